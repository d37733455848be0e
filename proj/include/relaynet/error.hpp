#ifndef RELAYNET_ERROR_HPP
#define RELAYNET_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace relaynet {

enum class Errc {
  schema,
  role,
  duplicate_id,
  degenerate_geometry,
  domain,
  cap_exceeded,
  flow_conservation,
  half_duplex,
  inconsistent_forwarding,
  infeasible_rate,
  infeasible_tau,
  not_applicable,
  model_violation,
  divergent_system,
  numerical,
  sampling_exhausted,
};

std::string_view to_string(Errc code) noexcept;

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);

  Errc code() const noexcept { return code_; }

  /// True for codes that describe an infeasible operating point (bad rates or
  /// forwarding) rather than a malformed input or a numerical failure.
  bool infeasible() const noexcept;

 private:
  Errc code_;
};

}  // namespace relaynet

#endif  // RELAYNET_ERROR_HPP
