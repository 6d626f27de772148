// Copyright 2026 The apexfas Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace apexfas {

/// One image plane stack stored row-major with interleaved channels
/// (index = (row * width + col) * channels + channel).
class Frame {
 public:
  Frame() = default;
  /// Zero-filled frame.
  Frame(std::size_t height, std::size_t width, std::size_t channels);
  /// Takes ownership of `pixels`; size must equal height*width*channels and
  /// every value must be finite.
  Frame(std::size_t height, std::size_t width, std::size_t channels, std::vector<float> pixels);

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t channels() const noexcept { return channels_; }
  std::size_t size() const noexcept { return pixels_.size(); }

  const std::vector<float>& pixels() const noexcept { return pixels_; }
  std::vector<float>& pixels() noexcept { return pixels_; }

  float at(std::size_t row, std::size_t col, std::size_t channel = 0) const {
    return pixels_[(row * width_ + col) * channels_ + channel];
  }
  float& at(std::size_t row, std::size_t col, std::size_t channel = 0) {
    return pixels_[(row * width_ + col) * channels_ + channel];
  }

  bool same_shape(const Frame& other) const noexcept {
    return height_ == other.height_ && width_ == other.width_ && channels_ == other.channels_;
  }
  bool in_unit_range() const noexcept;

  friend bool operator==(const Frame&, const Frame&) = default;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::size_t channels_ = 0;
  std::vector<float> pixels_;
};

/// Ordered, non-empty stack of equally shaped frames with pixels in [0, 1].
/// Frame indices are 1-based in every public API that takes an index.
class VideoTensor {
 public:
  VideoTensor(std::string id, std::vector<Frame> frames);

  const std::string& id() const noexcept { return id_; }
  const std::vector<Frame>& frames() const noexcept { return frames_; }
  std::size_t num_frames() const noexcept { return frames_.size(); }
  std::size_t height() const noexcept { return frames_.front().height(); }
  std::size_t width() const noexcept { return frames_.front().width(); }
  std::size_t channels() const noexcept { return frames_.front().channels(); }
  /// 1-based access.
  const Frame& frame(std::size_t index) const;

  friend bool operator==(const VideoTensor&, const VideoTensor&) = default;

 private:
  std::string id_;
  std::vector<Frame> frames_;
};

/// A Gaussian-weighted summary frame together with where it came from.
struct ApexFrame {
  Frame frame;
  std::string source_id;
  std::size_t segment_start = 1;  // 1-based, inclusive
  std::size_t segment_end = 1;
  double sigma = 5.0;
};

enum class Label { Spoof, Live, Unlabeled };
enum class Split { Train, Val, Test };

std::string_view to_string(Label label);
std::string_view to_string(Split split);
Label parse_label(std::string_view token);
Split parse_split(std::string_view token);

struct ManifestEntry {
  std::filesystem::path video_path;
  Label label = Label::Unlabeled;
  Split split = Split::Train;
  std::string domain_tag;
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;

  /// Entries matching a split, in manifest order.
  std::vector<ManifestEntry> select(Split split) const;
  /// Entries whose domain tag is `domain`.
  DatasetManifest filter_domain(std::string_view domain) const;
};

/// AFV1 container: "AFV1", u32 num_frames, u32 height, u32 width,
/// u32 channels (little-endian), then frame-major row-major f32 pixels.
void write_video(const VideoTensor& video, const std::filesystem::path& path);
/// Inverse of write_video. The video id is the file stem.
VideoTensor read_video(const std::filesystem::path& path);

/// Binary PGM (1 channel) or PPM (3 channels), maxval 255, byte = round(v * 255).
void write_frame_image(const Frame& frame, const std::filesystem::path& path);

/// One `path,label,split,domain_tag` entry per line. Blank lines and lines
/// starting with '#' are ignored. Relative paths resolve against the
/// manifest's directory.
DatasetManifest load_manifest(const std::filesystem::path& path);
/// Writes entries verbatim; paths are emitted as stored.
void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);

}  // namespace apexfas
