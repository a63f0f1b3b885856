#include "capcorpus/model.hpp"

#include <cmath>

namespace capcorpus {

Millis from_seconds(double seconds) { return Millis{std::llround(seconds * 1000.0)}; }

std::string_view to_string(RejectReason reason) {
  switch (reason) {
    case RejectReason::overlap: return "overlap";
    case RejectReason::music: return "music";
    case RejectReason::non_ascii: return "non_ascii";
    case RejectReason::url: return "url";
    case RejectReason::charset: return "charset";
    case RejectReason::duration: return "duration";
    case RejectReason::similarity_gate: return "similarity_gate";
    case RejectReason::empty_after_normalization: return "empty_after_normalization";
    case RejectReason::alignment_unavailable: return "alignment_unavailable";
    case RejectReason::media_unavailable: return "media_unavailable";
  }
  return "unknown";
}

std::optional<RejectReason> parse_reject_reason(std::string_view name) {
  for (auto r : kAllRejectReasons) {
    if (to_string(r) == name) return r;
  }
  return std::nullopt;
}

std::string_view to_string(Status status) {
  switch (status) {
    case Status::candidate: return "candidate";
    case Status::rejected: return "rejected";
    case Status::merged: return "merged";
    case Status::aligned: return "aligned";
    case Status::accepted: return "accepted";
  }
  return "unknown";
}

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

}  // namespace

std::string describe(const LifecycleEvent& e) {
  return std::visit(
      overloaded{
          [](const event::Reject& r) { return "reject(" + std::string(to_string(r.reason)) + ")"; },
          [](const event::Merge&) { return std::string("merge"); },
          [](const event::AlignOk&) { return std::string("align_ok"); },
          [](const event::AlignUnavailable&) { return std::string("align_unavailable"); },
          [](const event::Accept&) { return std::string("accept"); },
      },
      e);
}

IllegalTransition::IllegalTransition(Status from, const LifecycleEvent& e)
    : Error("illegal transition: " + describe(e) + " from status " + std::string(to_string(from))),
      from_(from) {}

Utterance advance_status(const Utterance& u, const LifecycleEvent& e) {
  Utterance next = u;
  const Status from = u.status;
  const bool ok = std::visit(
      overloaded{
          [&](const event::Reject& r) {
            if (from == Status::rejected || from == Status::accepted) return false;
            next.status = Status::rejected;
            next.reject_reason = r.reason;
            return true;
          },
          [&](const event::Merge&) {
            if (from != Status::candidate) return false;
            next.status = Status::merged;
            return true;
          },
          [&](const event::AlignOk&) {
            if (from != Status::merged) return false;
            next.status = Status::aligned;
            return true;
          },
          [&](const event::AlignUnavailable&) {
            if (from != Status::merged) return false;
            next.status = Status::aligned;
            next.warnings.emplace_back(to_string(RejectReason::alignment_unavailable));
            return true;
          },
          [&](const event::Accept&) {
            if (from != Status::aligned) return false;
            next.status = Status::accepted;
            return true;
          },
      },
      e);
  if (!ok) throw IllegalTransition(from, e);
  return next;
}

void validate(const ManifestEntry& entry) {
  if (entry.transcript.empty()) throw Error("manifest entry " + entry.sample_id + ": empty transcript");
  if (std::abs(entry.duration_s - (entry.end_s - entry.start_s)) > 0.001 + 1e-9) {
    throw Error("manifest entry " + entry.sample_id + ": duration_s disagrees with end_s - start_s");
  }
}

void validate(const ReviewVerdict& v, std::string_view original_transcript) {
  if (v.sample_id.empty()) throw Error("verdict without sample_id");
  if (v.verdict == Verdict::corrected) {
    if (!v.corrected_transcript || v.corrected_transcript->empty()) {
      throw Error("corrected verdict requires corrected_transcript");
    }
    if (*v.corrected_transcript == original_transcript) {
      throw Error("corrected_transcript equals the original transcript");
    }
  }
}

}  // namespace capcorpus
