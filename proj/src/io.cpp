#include "aos/io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "aos/config.hpp"
#include "aos/error.hpp"

namespace aos::io {

namespace fs = std::filesystem;

Image<std::uint16_t> quantize_radiance(const ImageF& image) {
  Image<std::uint16_t> out(image.width(), image.height());
  const auto src = image.pixels();
  auto dst = out.pixels();
  for (std::size_t i = 0; i < src.size(); ++i) {
    const double c = std::round(static_cast<double>(src[i]) * kRadianceScale);
    dst[i] = static_cast<std::uint16_t>(std::clamp(c, 0.0, 65535.0));
  }
  return out;
}

ImageF dequantize_radiance(const Image<std::uint16_t>& counts) {
  ImageF out(counts.width(), counts.height());
  const auto src = counts.pixels();
  auto dst = out.pixels();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = static_cast<float>(src[i] / kRadianceScale);
  return out;
}

namespace {

struct PngWriter {
  png_structp png = nullptr;
  png_infop info = nullptr;
  PngWriter() {
    png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (png) info = png_create_info_struct(png);
    if (!png || !info) throw IoError("libpng: cannot allocate write structures");
  }
  ~PngWriter() { png_destroy_write_struct(&png, &info); }
  PngWriter(const PngWriter&) = delete;
  PngWriter& operator=(const PngWriter&) = delete;
};

struct PngReader {
  png_structp png = nullptr;
  png_infop info = nullptr;
  PngReader() {
    png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (png) info = png_create_info_struct(png);
    if (!png || !info) throw IoError("libpng: cannot allocate read structures");
  }
  ~PngReader() { png_destroy_read_struct(&png, &info, nullptr); }
  PngReader(const PngReader&) = delete;
  PngReader& operator=(const PngReader&) = delete;
};

void append_bytes(png_structp png, png_bytep data, png_size_t length) {
  auto* out = static_cast<Bytes*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + length);
}

void flush_noop(png_structp) {}

struct ReadCursor {
  const Bytes* bytes;
  std::size_t offset;
};

void read_bytes(png_structp png, png_bytep data, png_size_t length) {
  auto* cur = static_cast<ReadCursor*>(png_get_io_ptr(png));
  if (cur->offset + length > cur->bytes->size()) png_error(png, "truncated PNG stream");
  std::memcpy(data, cur->bytes->data() + cur->offset, length);
  cur->offset += length;
}

// Rows are prepared by the caller as raw PNG scanlines.
Bytes encode_rows(int width, int height, int bit_depth, int color_type, std::vector<Bytes>& rows) {
  PngWriter w;
  Bytes out;
  std::vector<png_bytep> pointers(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) pointers[i] = rows[i].data();
  if (setjmp(png_jmpbuf(w.png))) throw IoError("libpng: encoding failed");
  png_set_write_fn(w.png, &out, append_bytes, flush_noop);
  png_set_IHDR(w.png, w.info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), bit_depth,
               color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_set_rows(w.png, w.info, pointers.data());
  png_write_png(w.png, w.info, PNG_TRANSFORM_IDENTITY, nullptr);
  return out;
}

struct Decoded {
  int width = 0;
  int height = 0;
  int bit_depth = 0;
  int channels = 0;
  std::vector<Bytes> rows;
};

Decoded decode(const Bytes& bytes) {
  if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) throw IoError("not a PNG stream");
  PngReader r;
  ReadCursor cursor{&bytes, 0};
  Decoded d;
  if (setjmp(png_jmpbuf(r.png))) throw IoError("libpng: decoding failed");
  png_set_read_fn(r.png, &cursor, read_bytes);
  png_read_info(r.png, r.info);
  const int color = png_get_color_type(r.png, r.info);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(r.png);
  if (color == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(r.png, r.info) < 8) png_set_expand_gray_1_2_4_to_8(r.png);
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(r.png);
  png_read_update_info(r.png, r.info);
  d.width = static_cast<int>(png_get_image_width(r.png, r.info));
  d.height = static_cast<int>(png_get_image_height(r.png, r.info));
  d.bit_depth = png_get_bit_depth(r.png, r.info);
  d.channels = png_get_channels(r.png, r.info);
  const std::size_t rowbytes = png_get_rowbytes(r.png, r.info);
  d.rows.assign(static_cast<std::size_t>(d.height), Bytes(rowbytes));
  std::vector<png_bytep> pointers(d.rows.size());
  for (std::size_t i = 0; i < d.rows.size(); ++i) pointers[i] = d.rows[i].data();
  png_read_image(r.png, pointers.data());
  png_read_end(r.png, nullptr);
  return d;
}

}  // namespace

Bytes encode_png(const Image<std::uint16_t>& gray16) {
  std::vector<Bytes> rows(static_cast<std::size_t>(gray16.height()), Bytes(static_cast<std::size_t>(gray16.width()) * 2));
  for (int y = 0; y < gray16.height(); ++y) {
    const auto src = gray16.row(y);
    Bytes& row = rows[static_cast<std::size_t>(y)];
    for (int x = 0; x < gray16.width(); ++x) {
      row[2 * x] = static_cast<std::uint8_t>(src[x] >> 8);  // PNG is big-endian
      row[2 * x + 1] = static_cast<std::uint8_t>(src[x] & 0xff);
    }
  }
  return encode_rows(gray16.width(), gray16.height(), 16, PNG_COLOR_TYPE_GRAY, rows);
}

Bytes encode_png(const ImageRgb8& rgb) {
  std::vector<Bytes> rows(static_cast<std::size_t>(rgb.height()), Bytes(static_cast<std::size_t>(rgb.width()) * 3));
  for (int y = 0; y < rgb.height(); ++y) {
    const auto src = rgb.row(y);
    Bytes& row = rows[static_cast<std::size_t>(y)];
    for (int x = 0; x < rgb.width(); ++x) {
      std::copy(src[x].begin(), src[x].end(), row.begin() + 3 * x);
    }
  }
  return encode_rows(rgb.width(), rgb.height(), 8, PNG_COLOR_TYPE_RGB, rows);
}

Bytes encode_radiance_png(const ImageF& image) { return encode_png(quantize_radiance(image)); }

Bytes encode_display_png(const integral::DisplayImage& image) {
  return std::visit(
      [](const auto& img) -> Bytes {
        if constexpr (std::is_same_v<std::decay_t<decltype(img)>, ImageF>) {
          return encode_radiance_png(img);
        } else {
          return encode_png(img);
        }
      },
      image);
}

Bytes encode_depth_png(const metrics::DepthMap& map) {
  Image<std::uint16_t> counts(map.depth.width(), map.depth.height(), 0);
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (!map.valid.pixels()[i]) continue;
    const double c = std::round(map.depth.pixels()[i] * kDepthScale);
    counts.pixels()[i] = static_cast<std::uint16_t>(std::clamp(c, 1.0, 65535.0));
  }
  return encode_png(counts);
}

Image<std::uint16_t> decode_png_gray(const Bytes& png) {
  const Decoded d = decode(png);
  if (d.channels != 1) throw IoError("expected a grayscale PNG");
  Image<std::uint16_t> out(d.width, d.height);
  for (int y = 0; y < d.height; ++y) {
    const Bytes& row = d.rows[static_cast<std::size_t>(y)];
    auto dst = out.row(y);
    for (int x = 0; x < d.width; ++x) {
      dst[x] = d.bit_depth == 16 ? static_cast<std::uint16_t>((row[2 * x] << 8) | row[2 * x + 1]) : row[x];
    }
  }
  return out;
}

ImageRgb8 decode_png_rgb(const Bytes& png) {
  const Decoded d = decode(png);
  if (d.channels != 3 || d.bit_depth != 8) throw IoError("expected an 8-bit RGB PNG");
  ImageRgb8 out(d.width, d.height);
  for (int y = 0; y < d.height; ++y) {
    const Bytes& row = d.rows[static_cast<std::size_t>(y)];
    for (int x = 0; x < d.width; ++x) out.at(x, y) = {row[3 * x], row[3 * x + 1], row[3 * x + 2]};
  }
  return out;
}

Bytes read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  Bytes bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("cannot read " + path.string());
  return bytes;
}

void write_file(const fs::path& path, const Bytes& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("cannot write " + path.string());
}

void write_text(const fs::path& path, const std::string& text) {
  write_file(path, Bytes(text.begin(), text.end()));
}

std::string format_poses(const std::vector<PoseRecord>& records) {
  std::string out = "# index x y z fov width height\n";
  char line[256];
  for (const PoseRecord& r : records) {
    std::snprintf(line, sizeof line, "%d %.9g %.9g %.9g %.9g %d %d\n", r.index, r.x, r.y, r.z, r.fov, r.width,
                  r.height);
    out += line;
  }
  return out;
}

std::vector<PoseRecord> parse_poses(const std::string& text) {
  std::vector<PoseRecord> records;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    PoseRecord r;
    if (!(fields >> r.index >> r.x >> r.y >> r.z >> r.fov >> r.width >> r.height)) {
      throw IoError("poses sidecar line " + std::to_string(line_no) + ": expected 'index x y z fov width height'");
    }
    records.push_back(r);
  }
  return records;
}

std::string frame_file_name(int index) {
  char name[32];
  std::snprintf(name, sizeof name, "frame_%04d.png", index);
  return name;
}

void write_stack(const fs::path& dir, const ScanStack& stack, const sim::Scene* ground_truth) {
  if (!fs::is_directory(dir)) throw IoError("output directory does not exist: " + dir.string());
  std::vector<PoseRecord> records;
  for (std::size_t i = 0; i < stack.size(); ++i) {
    const Frame& f = stack.frame(i);
    write_file(dir / frame_file_name(static_cast<int>(i)), encode_radiance_png(f.image));
    records.push_back({static_cast<int>(i), f.pose.x, f.pose.y, f.pose.z, f.intrinsics.fov_deg,
                       f.intrinsics.width, f.intrinsics.height});
  }
  write_text(dir / kPosesFile, format_poses(records));
  if (ground_truth) write_text(dir / kSceneFile, config::format_scene(*ground_truth));
}

LoadedStack read_stack(const fs::path& dir) {
  const fs::path poses_path = dir / kPosesFile;
  if (!fs::is_regular_file(poses_path)) throw IoError("missing poses sidecar " + poses_path.string());
  const Bytes raw = read_file(poses_path);
  std::vector<PoseRecord> records = parse_poses(std::string(raw.begin(), raw.end()));
  if (records.empty()) throw IoError("poses sidecar lists no frames: " + poses_path.string());

  std::vector<Frame> frames;
  frames.reserve(records.size());
  for (const PoseRecord& r : records) {
    Frame f;
    f.pose = Pose{r.x, r.y, r.z};
    f.intrinsics = CameraIntrinsics{r.fov, r.width, r.height};
    const fs::path png = dir / frame_file_name(r.index);
    f.image = dequantize_radiance(decode_png_gray(read_file(png)));
    if (f.image.width() != r.width || f.image.height() != r.height) {
      throw IoError("frame size does not match poses sidecar: " + png.string());
    }
    frames.push_back(std::move(f));
  }
  LoadedStack loaded{ScanStack(std::move(frames)), std::move(records), std::nullopt};
  const fs::path scene_path = dir / kSceneFile;
  if (fs::is_regular_file(scene_path)) {
    const Bytes text = read_file(scene_path);
    loaded.ground_truth = config::parse_scene(std::string(text.begin(), text.end()));
  }
  return loaded;
}

}  // namespace aos::io
