// Copyright 2026 The plab Authors
// SPDX-License-Identifier: Apache-2.0

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "json.hpp"
#include "plab/model.hpp"

namespace plab {

using nlohmann::json;

namespace {

constexpr char kMagic[6] = {'P', 'L', 'A', 'B', '1', '\0'};

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

}  // namespace

void save_checkpoint(const Params<float>& params, const std::string& path) {
  json manifest = json::array();
  for (const TensorInfo& t : params.layout().tensors) {
    manifest.push_back({{"name", t.name}, {"shape", {t.rows, t.cols}}, {"offset", t.offset * 4}});
  }
  json header{{"config", json::parse(config_to_json(params.config()))}, {"manifest", manifest}};
  const std::string head = header.dump();

  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::io, "cannot write " + path);
    out.write(kMagic, sizeof kMagic);
    out.write(head.c_str(), static_cast<std::streamsize>(head.size() + 1));
    out.write(reinterpret_cast<const char*>(params.flat().data()),
              static_cast<std::streamsize>(params.flat().size() * sizeof(float)));
    if (!out) throw Error(Errc::io, "short write to " + path);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) throw Error(Errc::io, "cannot rename into " + path);
}

Params<float> load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot open checkpoint " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() < sizeof kMagic || std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) {
    throw Error(Errc::io, path + " is not a plab checkpoint");
  }
  const std::size_t head_end = bytes.find('\0', sizeof kMagic);
  if (head_end == std::string::npos) throw Error(Errc::io, path + ": unterminated header");
  json header = json::parse(bytes.substr(sizeof kMagic, head_end - sizeof kMagic));
  ModelConfig config = config_from_json(header.at("config").dump());
  Params<float> params(config);

  const std::size_t data_start = head_end + 1;
  const std::size_t want = static_cast<std::size_t>(params.flat().size()) * sizeof(float);
  if (bytes.size() - data_start != want) {
    throw Error(Errc::io, path + ": expected " + std::to_string(want) + " data bytes, found " +
                              std::to_string(bytes.size() - data_start));
  }
  const auto& manifest = header.at("manifest");
  const auto& tensors = params.layout().tensors;
  if (manifest.size() != tensors.size()) throw Error(Errc::io, path + ": manifest does not match config");
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    const auto& m = manifest[i];
    if (m.at("name") != tensors[i].name || m.at("shape")[0] != tensors[i].rows ||
        m.at("shape")[1] != tensors[i].cols || m.at("offset") != tensors[i].offset * 4) {
      throw Error(Errc::io, path + ": tensor " + tensors[i].name + " does not match config");
    }
  }
  std::memcpy(params.flat().data(), bytes.data() + data_start, want);
  return params;
}

}  // namespace plab
