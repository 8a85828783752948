#include "cropweed/weights_io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace cropweed {

namespace {

void put_u32(std::string& buf, uint32_t v) {
  char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
               static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  buf.append(b, 4);
}

uint32_t take_u32(const std::string& buf, size_t& pos, const char* what) {
  if (pos + 4 > buf.size())
    throw std::runtime_error(std::string("truncated weight file: missing ") + what);
  uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<uint8_t>(buf[pos + i]);
  pos += 4;
  return v;
}

}  // namespace

void save_weights(Model& model, const std::string& path) {
  std::string buf;
  buf.append("CWNN", 4);
  put_u32(buf, kWeightFormatVersion);
  std::string key = genotype_key(model.genotype);
  put_u32(buf, static_cast<uint32_t>(key.size()));
  buf += key;
  put_u32(buf, static_cast<uint32_t>(model.head_classes));
  for (Tensor* t : model.params())
    for (double v : t->data) {
      float f = static_cast<float>(v);
      static_assert(sizeof(float) == 4);
      char b[4];
      std::memcpy(b, &f, 4);  // little-endian host
      buf.append(b, 4);
    }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw std::runtime_error("write failed: " + path);
}

Model load_weights(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open weight file: " + path);
  std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  if (buf.size() < 4 || buf.compare(0, 4, "CWNN") != 0)
    throw std::runtime_error("bad magic in weight file " + path + " (expected CWNN)");
  size_t pos = 4;
  uint32_t version = take_u32(buf, pos, "format version");
  if (version != kWeightFormatVersion)
    throw std::runtime_error("unsupported weight format version " + std::to_string(version) +
                             " (expected " + std::to_string(kWeightFormatVersion) + ")");
  uint32_t key_len = take_u32(buf, pos, "genotype key length");
  if (pos + key_len > buf.size())
    throw std::runtime_error("truncated weight file: genotype key cut short");
  std::string key = buf.substr(pos, key_len);
  pos += key_len;
  Genotype g = parse_genotype_key(key);
  uint32_t head = take_u32(buf, pos, "head size");
  if (head < 2) throw std::runtime_error("weight file declares head size " + std::to_string(head));

  if ((buf.size() - pos) % 4 != 0)
    throw std::runtime_error("truncated weight file: weight bytes not a multiple of 4");
  long long floats = static_cast<long long>((buf.size() - pos) / 4);

  // The array length pins the input side: param_count grows strictly with it.
  int input_side = 0;
  for (int side = 2; side <= 1024; side += 2) {
    long long want;
    try {
      want = param_count(g, static_cast<int>(head), side);
    } catch (const std::exception&) {
      continue;  // side not divisible by the pool chain
    }
    if (want == floats) {
      input_side = side;
      break;
    }
    if (want > floats) break;
  }
  if (input_side == 0)
    throw std::runtime_error("truncated weight file: " + std::to_string(floats) +
                             " float32 values do not match any input size for " + key);

  Model m = realize(g, static_cast<int>(head), 0, input_side);
  for (Tensor* t : m.params())
    for (double& v : t->data) {
      float f;
      std::memcpy(&f, buf.data() + pos, 4);
      pos += 4;
      v = f;
    }
  return m;
}

}  // namespace cropweed
