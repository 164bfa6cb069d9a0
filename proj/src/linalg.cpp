#include "pirlab/linalg.hpp"

namespace pir {

const char* to_string(PropagatorRoute route) noexcept {
  switch (route) {
    case PropagatorRoute::ClosedForm: return "closed_form";
    case PropagatorRoute::Eigen: return "eigen";
    case PropagatorRoute::Series: return "series";
  }
  return "?";
}

PropagatorRoute route_from_string(const std::string& name) {
  if (name == "closed_form" || name == "closed-form") return PropagatorRoute::ClosedForm;
  if (name == "eigen") return PropagatorRoute::Eigen;
  if (name == "series" || name == "pade") return PropagatorRoute::Series;
  fail(Errc::configuration, "unknown propagator route '" + name + "'");
}

}  // namespace pir
