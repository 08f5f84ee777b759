#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

namespace hetpart {

// Every failure the library reports carries a short machine-readable code
// ("format", "validation", "not-found", ...) next to the human message.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

namespace errc {
inline constexpr const char* kFormat = "format";
inline constexpr const char* kValidation = "validation";
inline constexpr const char* kNotFound = "not-found";
inline constexpr const char* kIo = "io";
inline constexpr const char* kArgument = "argument";
inline constexpr const char* kTooLarge = "too-large";
inline constexpr const char* kPlanMismatch = "plan-mismatch";
}  // namespace errc

std::string read_text_file(const std::filesystem::path& path);

// Writes to a sibling temporary file and renames it over the target.
void write_text_file_atomic(const std::filesystem::path& path,
                            const std::string& contents);

}  // namespace hetpart
