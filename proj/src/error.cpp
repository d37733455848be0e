#include "relaynet/error.hpp"

namespace relaynet {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::schema: return "schema";
    case Errc::role: return "role";
    case Errc::duplicate_id: return "duplicate-id";
    case Errc::degenerate_geometry: return "degenerate-geometry";
    case Errc::domain: return "domain";
    case Errc::cap_exceeded: return "cap-exceeded";
    case Errc::flow_conservation: return "flow-conservation";
    case Errc::half_duplex: return "half-duplex";
    case Errc::inconsistent_forwarding: return "inconsistent-forwarding";
    case Errc::infeasible_rate: return "infeasible-rate";
    case Errc::infeasible_tau: return "infeasible-tau";
    case Errc::not_applicable: return "not-applicable";
    case Errc::model_violation: return "model-violation";
    case Errc::divergent_system: return "divergent-system";
    case Errc::numerical: return "numerical";
    case Errc::sampling_exhausted: return "sampling-exhausted";
  }
  return "unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

bool Error::infeasible() const noexcept {
  switch (code_) {
    case Errc::flow_conservation:
    case Errc::half_duplex:
    case Errc::inconsistent_forwarding:
    case Errc::infeasible_rate:
    case Errc::infeasible_tau:
    case Errc::model_violation:
    case Errc::divergent_system:
      return true;
    default:
      return false;
  }
}

}  // namespace relaynet
