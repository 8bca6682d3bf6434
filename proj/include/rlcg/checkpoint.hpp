#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "rlcg/hyper.hpp"
#include "rlcg/qnet.hpp"

namespace rlcg {

inline constexpr std::string_view kCheckpointMagic = "RLCG-CKPT";
inline constexpr std::string_view kCheckpointVersion = "v1";

enum class CheckpointErrorKind { CorruptPayload, VersionMismatch, ShapeMismatch };

class CheckpointError : public std::runtime_error {
 public:
  CheckpointError(CheckpointErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  CheckpointErrorKind kind() const noexcept { return kind_; }

 private:
  CheckpointErrorKind kind_;
};

struct Checkpoint {
  HyperParams hyper;
  QNetworkParams params;
};

// "RLCG-CKPT v1\n" followed by a JSON document
//   {"hyper": {...}, "step_count": n,
//    "tensors": [{"name", "shape": [rows, cols], "data": ["<f64>", ...]}, ...]}
// Values are shortest round-trip decimal strings; Adam moments are stored as
// tensors prefixed "adam_m/" and "adam_v/".
std::string save_checkpoint(const QNetworkParams& params, const HyperParams& hyper);
Checkpoint load_checkpoint(std::string_view bytes);

void write_checkpoint_file(const std::string& path, const QNetworkParams& params, const HyperParams& hyper);
Checkpoint read_checkpoint_file(const std::string& path);

}  // namespace rlcg
