#include "streamvault/crypto/aead.hpp"

#include <openssl/evp.h>

#include <memory>

#include "streamvault/common/error.hpp"

namespace sv::crypto {

namespace {

struct CtxDeleter {
  void operator()(EVP_CIPHER_CTX* ctx) const { EVP_CIPHER_CTX_free(ctx); }
};
using CtxPtr = std::unique_ptr<EVP_CIPHER_CTX, CtxDeleter>;

CtxPtr new_ctx() {
  CtxPtr ctx(EVP_CIPHER_CTX_new());
  if (!ctx) throw std::bad_alloc();
  return ctx;
}

[[noreturn]] void openssl_failure(const char* what) {
  throw Error(Errc::InvalidArgument, std::string("AES-GCM: ") + what);
}

}  // namespace

Bytes aead_seal(const AeadKey& key, const AeadNonce& nonce, ByteView plaintext, ByteView aad) {
  auto ctx = new_ctx();
  if (EVP_EncryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, key.data(), nonce.data()) != 1)
    openssl_failure("init");
  int len = 0;
  if (!aad.empty() &&
      EVP_EncryptUpdate(ctx.get(), nullptr, &len, aad.data(), static_cast<int>(aad.size())) != 1)
    openssl_failure("aad");

  Bytes out(plaintext.size() + kAeadTagSize);
  int written = 0;
  if (!plaintext.empty()) {
    if (EVP_EncryptUpdate(ctx.get(), out.data(), &len, plaintext.data(),
                          static_cast<int>(plaintext.size())) != 1)
      openssl_failure("update");
    written = len;
  }
  if (EVP_EncryptFinal_ex(ctx.get(), out.data() + written, &len) != 1) openssl_failure("final");
  written += len;
  if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_GET_TAG, kAeadTagSize, out.data() + written) != 1)
    openssl_failure("tag");
  out.resize(static_cast<std::size_t>(written) + kAeadTagSize);
  return out;
}

Bytes aead_open(const AeadKey& key, const AeadNonce& nonce, ByteView sealed, ByteView aad) {
  if (sealed.size() < kAeadTagSize) throw Error(Errc::BadTag, "ciphertext shorter than tag");
  auto ctx = new_ctx();
  if (EVP_DecryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, key.data(), nonce.data()) != 1)
    openssl_failure("init");
  int len = 0;
  if (!aad.empty() &&
      EVP_DecryptUpdate(ctx.get(), nullptr, &len, aad.data(), static_cast<int>(aad.size())) != 1)
    openssl_failure("aad");

  const auto body = sealed.first(sealed.size() - kAeadTagSize);
  Bytes out(body.size());
  int written = 0;
  if (!body.empty()) {
    if (EVP_DecryptUpdate(ctx.get(), out.data(), &len, body.data(), static_cast<int>(body.size())) != 1)
      openssl_failure("update");
    written = len;
  }
  FixedBytes<kAeadTagSize> tag{};
  std::copy(sealed.end() - kAeadTagSize, sealed.end(), tag.begin());
  if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_TAG, kAeadTagSize, tag.data()) != 1)
    openssl_failure("set tag");
  if (EVP_DecryptFinal_ex(ctx.get(), out.data() + written, &len) != 1) throw Error(Errc::BadTag);
  out.resize(static_cast<std::size_t>(written + len));
  return out;
}

}  // namespace sv::crypto
