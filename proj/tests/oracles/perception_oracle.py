"""Independent evaluation of the perception-model constants frozen in the tests.

Plain math-module arithmetic written separately from the C++ code. Run it to
regenerate the numbers pinned in test_perception.cpp and the acceptance suite.
"""
import math

E_D = 0.065        # inter-ocular distance, m
V_D = 2.4852       # display image distance, m
FOV_D = 68.0       # display horizontal field of view, deg
FOV_F = 61.0       # camera field of view, deg
V_F = 26.0         # capture focal distance, m
C = 3437.75        # arcmin per radian in the JDDI formula


def scale():
    return V_D * math.tan(math.radians(FOV_D / 2)) / (V_F * math.tan(math.radians(FOV_F / 2)))


def display_disparity(e_f, h_t):
    z = V_F - h_t
    capture = e_f * (z - V_F) / z
    return scale() * capture


def arcmin(d):
    return math.degrees(2 * math.atan(d / (2 * V_D))) * 60


def pth(d):
    z = E_D * V_D / (E_D - d)
    return V_D - z


def jddi(acuity):
    return acuity * V_D ** 2 / (C * E_D + V_D)


def max_fusible(h_t, limit=1.0, sep=60.0):
    k = scale() * h_t / (V_F - h_t)
    angle = math.radians(limit * sep / 60)
    return 2 * V_D * math.tan(angle / 2) / k


def detectable(h_t, acuity=6.0):
    j = jddi(acuity)
    k = scale() * h_t / (V_F - h_t)
    return j * E_D / (k * (V_D - j))


if __name__ == "__main__":
    print("jddi(6)", jddi(6.0), "jddi(0.3)", jddi(0.3))
    for h in (0.3, 1.8, 21.0):
        d = display_disparity(1.0, h)
        print(f"h_t={h}: d={d:.9g} m, {arcmin(d):.9g} arcmin, PTH={pth(d):.9g} m, "
              f"fusible<= {max_fusible(h):.9g} m, detectable>= {detectable(h):.9g} m")
    print("standing - lying arcmin", abs(arcmin(display_disparity(1, 1.8)) - arcmin(display_disparity(1, 0.3))))
    f = 320 / math.tan(math.radians(FOV_F / 2))
    print("f_px", f)
    for e in (0.5, 1, 2, 4):
        print("expected px", e, f * e * (1 / (26 - 1.8) - 1 / 26))
    print("point spread b", 4 * 21 / (26 - 21), "ground sample", 26 / f)
    print("perceived_distance(0.065, 2.4852, 0.01)", 0.065 * 2.4852 / (0.065 - 0.01))
