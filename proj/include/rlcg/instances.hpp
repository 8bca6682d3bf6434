#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rlcg {

// A one-dimensional cutting stock instance with demands aggregated per
// distinct order size. Sizes are stored in descending order.
struct Instance {
  std::string name;
  int roll_length = 0;
  std::vector<int> sizes;
  std::vector<int> demands;

  std::size_t num_order_types() const noexcept { return sizes.size(); }
  long long total_items() const noexcept;

  friend bool operator==(const Instance&, const Instance&) = default;
};

enum class ParseErrorKind {
  EmptyInput,
  MalformedInteger,
  ItemCountMismatch,
  SizeExceedsRoll,
  NonPositiveValue,
};

class ParseError : public std::runtime_error {
 public:
  ParseError(ParseErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ParseErrorKind kind() const noexcept { return kind_; }

 private:
  ParseErrorKind kind_;
};

class InstanceError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Throws InstanceError when any invariant (distinct sizes in [1, L],
// positive demands, matching lengths) is violated.
void validate(const Instance& instance);

// Aggregates a raw item list into an Instance (equal sizes summed, sizes
// sorted descending).
Instance aggregate_items(std::string name, int roll_length, const std::vector<int>& items);

// BPPLIB text: item count m, roll length L, then m item sizes, one per line.
Instance parse_bpplib(std::string_view text, std::string name = {});
// Demand-expanded BPPLIB text (one line per item, sizes descending).
std::string to_bpplib(const Instance& instance);

Instance load_bpplib_file(const std::string& path);
void save_bpplib_file(const Instance& instance, const std::string& path);

// Shortest decimal that round-trips, e.g. 0.1 -> "0.1".
std::string format_fraction(double value);

// num_items sizes uniform in [ceil(frac_min L), floor(frac_max L)], one
// item per draw, aggregated. Named "BPP_{L}_{m}_{frac_min}_{frac_max}_{seed}".
Instance generate_instance(int roll_length, int num_items, double frac_min, double frac_max,
                           std::uint64_t seed);

struct CurriculumStage {
  int count = 1;
  int roll_length = 0;
  int num_orders = 0;
  double frac_min = 0.1;
  double frac_max = 0.7;

  friend bool operator==(const CurriculumStage&, const CurriculumStage&) = default;
};

void validate(const CurriculumStage& stage);

// Instance j (global index over all stages) uses seed base_seed + j.
std::vector<Instance> build_curriculum(const std::vector<CurriculumStage>& stages,
                                       std::uint64_t base_seed);

// One stage per line: "count L m frac_min frac_max". Blank lines and lines
// starting with '#' are ignored.
std::vector<CurriculumStage> parse_stage_config(std::string_view text);
std::string format_stage_config(const std::vector<CurriculumStage>& stages);

namespace presets {
// Ten stages of 40 instances, L in {50, 100, 200}.
std::vector<CurriculumStage> full_curriculum();
// Three stages of 10 instances, L in {20, 30, 50}.
std::vector<CurriculumStage> desk_curriculum();
// Validation split: same roll lengths as desk training, 2 per length.
std::vector<CurriculumStage> desk_validation();
// Test split: 20 instances, roll lengths strictly larger than any desk
// training roll length.
std::vector<CurriculumStage> desk_test();

// Seeds used by the command-line presets so the splits never share seeds.
inline constexpr std::uint64_t kTrainSeed = 1000;
inline constexpr std::uint64_t kValidationSeed = 2000;
inline constexpr std::uint64_t kTestSeed = 3000;
}  // namespace presets

}  // namespace rlcg
