#include "manifest.hpp"

#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <memory>

#include "relaynet/error.hpp"

namespace relaynet::cli {

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::schema, "cannot read " + path.string());

  const std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                                     &EVP_MD_CTX_free);
  EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
  std::array<char, 1 << 14> buffer{};
  while (in) {
    in.read(buffer.data(), buffer.size());
    EVP_DigestUpdate(ctx.get(), buffer.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  EVP_DigestFinal_ex(ctx.get(), digest.data(), &length);

  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int k = 0; k < length; ++k) {
    hex += kHex[digest[k] >> 4];
    hex += kHex[digest[k] & 15];
  }
  return hex;
}

Json RunManifest::to_json() const {
  Json files = Json::array();
  for (const auto& path : inputs) {
    files.push_back({{"path", path.string()}, {"sha256", sha256_file(path)}});
  }
  return {{"tool", "relaynet"},
          {"version", kToolVersion},
          {"subcommand", subcommand},
          {"arguments", arguments},
          {"options", options},
          {"inputs", files},
          {"seeds", seeds},
          {"wall_time_s", wall_time_s}};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::schema, "cannot write " + path.string());
  out << text;
}

}  // namespace relaynet::cli
