#include "esim/types.hpp"

namespace esim {

std::string_view to_label(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::RigidMin:
      return "min_replicas";
    case PolicyKind::RigidMax:
      return "max_replicas";
    case PolicyKind::Moldable:
      return "moldable";
    case PolicyKind::Elastic:
      return "elastic";
  }
  throw SimulationError("unknown policy kind");
}

std::optional<PolicyKind> parse_policy(std::string_view text) {
  if (text == "min" || text == "min_replicas") return PolicyKind::RigidMin;
  if (text == "max" || text == "max_replicas") return PolicyKind::RigidMax;
  if (text == "moldable") return PolicyKind::Moldable;
  if (text == "elastic") return PolicyKind::Elastic;
  return std::nullopt;
}

std::strong_ordering effective_priority_cmp(const JobSpec& a,
                                            const JobSpec& b) {
  if (a.priority != b.priority)
    return a.priority > b.priority ? std::strong_ordering::less
                                   : std::strong_ordering::greater;
  if (a.submit_time != b.submit_time)
    return a.submit_time < b.submit_time ? std::strong_ordering::less
                                         : std::strong_ordering::greater;
  return a.id <=> b.id;
}

bool schedules_before(const JobSpec& a, const JobSpec& b) {
  return effective_priority_cmp(a, b) < 0;
}

}  // namespace esim
