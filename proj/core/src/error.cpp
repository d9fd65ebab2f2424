#include "cdisc/error.hpp"

namespace cdisc {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::io: return "IoError";
    case Errc::parse: return "ParseError";
    case Errc::invalid_argument: return "InvalidArgument";
    case Errc::missing_candidate: return "MissingCandidate";
    case Errc::empty_vocab: return "EmptyVocab";
    case Errc::empty_input: return "EmptyInput";
    case Errc::zero_vector: return "ZeroVector";
    case Errc::malformed_header: return "MalformedHeader";
    case Errc::dimension_mismatch: return "DimensionMismatch";
    case Errc::duplicate_token: return "DuplicateToken";
    case Errc::unknown_token: return "UnknownToken";
    case Errc::too_few_items: return "TooFewItems";
    case Errc::degenerate_variance: return "DegenerateVariance";
    case Errc::k_out_of_range: return "KOutOfRange";
    case Errc::single_cluster: return "SingleCluster";
    case Errc::duplicate_member: return "DuplicateMember";
    case Errc::unknown_exclusion: return "UnknownExclusion";
    case Errc::missing_labels: return "MissingLabels";
    case Errc::empty_tree: return "EmptyTree";
    case Errc::empty_dataset: return "EmptyDataset";
    case Errc::k_exceeds_data: return "KExceedsData";
    case Errc::invalid_model: return "InvalidModel";
    case Errc::config: return "ConfigError";
    case Errc::stage_failed: return "StageFailed";
  }
  return "Unknown";
}

}  // namespace cdisc
