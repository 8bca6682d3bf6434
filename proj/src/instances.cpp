#include "rlcg/instances.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "rlcg/io_error.hpp"
#include "rlcg/rng.hpp"

namespace rlcg {

long long Instance::total_items() const noexcept {
  return std::accumulate(demands.begin(), demands.end(), 0LL);
}

void validate(const Instance& instance) {
  if (instance.roll_length < 1) throw InstanceError("roll length must be positive");
  if (instance.sizes.empty()) throw InstanceError("instance has no order types");
  if (instance.sizes.size() != instance.demands.size())
    throw InstanceError("sizes and demands differ in length");
  for (std::size_t i = 0; i < instance.sizes.size(); ++i) {
    if (instance.sizes[i] < 1 || instance.sizes[i] > instance.roll_length)
      throw InstanceError("order size " + std::to_string(instance.sizes[i]) + " outside [1, L]");
    if (instance.demands[i] < 1) throw InstanceError("demand must be positive");
    if (i > 0 && instance.sizes[i] >= instance.sizes[i - 1])
      throw InstanceError("sizes must be distinct and stored in descending order");
  }
}

Instance aggregate_items(std::string name, int roll_length, const std::vector<int>& items) {
  std::map<int, int, std::greater<>> counts;
  for (int size : items) ++counts[size];
  Instance out;
  out.name = std::move(name);
  out.roll_length = roll_length;
  for (const auto& [size, count] : counts) {
    out.sizes.push_back(size);
    out.demands.push_back(count);
  }
  return out;
}

namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t'))
      line.remove_suffix(1);
    while (!line.empty() && (line.front() == ' ' || line.front() == '\t')) line.remove_prefix(1);
    if (!line.empty()) lines.push_back(line);
    if (end == text.size()) break;
    start = end + 1;
  }
  return lines;
}

long long parse_int(std::string_view token, std::size_t line_no) {
  long long value = 0;
  const auto* first = token.data();
  const auto* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last)
    throw ParseError(ParseErrorKind::MalformedInteger,
                     "line " + std::to_string(line_no) + ": malformed integer '" + std::string(token) + "'");
  return value;
}

}  // namespace

Instance parse_bpplib(std::string_view text, std::string name) {
  const auto lines = split_lines(text);
  if (lines.empty()) throw ParseError(ParseErrorKind::EmptyInput, "empty instance file");
  if (lines.size() < 2)
    throw ParseError(ParseErrorKind::ItemCountMismatch, "missing roll length line");
  const long long m = parse_int(lines[0], 1);
  const long long roll = parse_int(lines[1], 2);
  if (m < 1 || roll < 1)
    throw ParseError(ParseErrorKind::NonPositiveValue, "item count and roll length must be positive");
  if (static_cast<long long>(lines.size()) - 2 != m)
    throw ParseError(ParseErrorKind::ItemCountMismatch,
                     "header declares " + std::to_string(m) + " items, found " +
                         std::to_string(lines.size() - 2));
  std::vector<int> items;
  items.reserve(static_cast<std::size_t>(m));
  for (std::size_t i = 2; i < lines.size(); ++i) {
    // BPPLIB variants may append a demand column; only the first token is the size.
    std::string_view token = lines[i];
    if (const auto ws = token.find_first_of(" \t"); ws != std::string_view::npos) token = token.substr(0, ws);
    const long long size = parse_int(token, i + 1);
    if (size < 1)
      throw ParseError(ParseErrorKind::NonPositiveValue, "line " + std::to_string(i + 1) + ": size must be positive");
    if (size > roll)
      throw ParseError(ParseErrorKind::SizeExceedsRoll,
                       "line " + std::to_string(i + 1) + ": size " + std::to_string(size) +
                           " exceeds roll length " + std::to_string(roll));
    items.push_back(static_cast<int>(size));
  }
  return aggregate_items(std::move(name), static_cast<int>(roll), items);
}

std::string to_bpplib(const Instance& instance) {
  std::ostringstream out;
  out << instance.total_items() << '\n' << instance.roll_length << '\n';
  for (std::size_t i = 0; i < instance.sizes.size(); ++i)
    for (int k = 0; k < instance.demands[i]; ++k) out << instance.sizes[i] << '\n';
  return out.str();
}

Instance load_bpplib_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open instance file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string stem = path;
  if (const auto slash = stem.find_last_of('/'); slash != std::string::npos) stem = stem.substr(slash + 1);
  if (const auto dot = stem.rfind(".txt"); dot != std::string::npos && dot + 4 == stem.size())
    stem = stem.substr(0, dot);
  return parse_bpplib(buf.str(), stem);
}

void save_bpplib_file(const Instance& instance, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write instance file: " + path);
  out << to_bpplib(instance);
}

std::string format_fraction(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  (void)ec;
  return std::string(buf, ptr);
}

namespace {

// Product of a fraction and an integer length, snapped to an integer when it
// lies within rounding noise of one (0.1 * 50 is 5, not 5.000000000000001).
double scaled(double frac, int length) {
  const double x = frac * length;
  const double r = std::round(x);
  return std::abs(x - r) < 1e-9 ? r : x;
}

}  // namespace

Instance generate_instance(int roll_length, int num_items, double frac_min, double frac_max,
                           std::uint64_t seed) {
  if (roll_length < 1) throw InstanceError("roll length must be positive");
  if (num_items < 1) throw InstanceError("num_items must be at least 1");
  if (!(frac_min > 0.0 && frac_min < frac_max && frac_max <= 1.0))
    throw InstanceError("fractions must satisfy 0 < frac_min < frac_max <= 1");
  const auto lo = static_cast<std::int64_t>(std::ceil(scaled(frac_min, roll_length)));
  const auto hi = static_cast<std::int64_t>(std::floor(scaled(frac_max, roll_length)));
  if (lo > hi || hi < 1)
    throw InstanceError("empty size range [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  SplitMix64 rng(seed);
  std::vector<int> items(static_cast<std::size_t>(num_items));
  for (auto& item : items) item = static_cast<int>(rng.uniform_int(std::max<std::int64_t>(lo, 1), hi));
  std::string name = "BPP_" + std::to_string(roll_length) + "_" + std::to_string(num_items) + "_" +
                     format_fraction(frac_min) + "_" + format_fraction(frac_max) + "_" +
                     std::to_string(seed);
  return aggregate_items(std::move(name), roll_length, items);
}

void validate(const CurriculumStage& stage) {
  if (stage.count < 1) throw InstanceError("stage count must be at least 1");
  if (stage.roll_length < 1 || stage.num_orders < 1)
    throw InstanceError("stage roll length and order count must be positive");
  if (!(stage.frac_min > 0.0 && stage.frac_min < stage.frac_max && stage.frac_max <= 1.0))
    throw InstanceError("stage fractions must satisfy 0 < frac_min < frac_max <= 1");
}

std::vector<Instance> build_curriculum(const std::vector<CurriculumStage>& stages,
                                       std::uint64_t base_seed) {
  if (stages.empty()) throw InstanceError("curriculum has no stages");
  std::vector<Instance> out;
  std::uint64_t index = 0;
  for (const auto& stage : stages) {
    validate(stage);
    for (int j = 0; j < stage.count; ++j, ++index)
      out.push_back(generate_instance(stage.roll_length, stage.num_orders, stage.frac_min,
                                      stage.frac_max, base_seed + index));
  }
  return out;
}

std::vector<CurriculumStage> parse_stage_config(std::string_view text) {
  std::vector<CurriculumStage> stages;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream fields(line);
    CurriculumStage stage;
    std::string extra;
    if (!(fields >> stage.count >> stage.roll_length >> stage.num_orders >> stage.frac_min >> stage.frac_max) ||
        (fields >> extra))
      throw ParseError(ParseErrorKind::MalformedInteger,
                       "stage config line " + std::to_string(line_no) +
                           ": expected 'count L m frac_min frac_max'");
    validate(stage);
    stages.push_back(stage);
  }
  if (stages.empty()) throw ParseError(ParseErrorKind::EmptyInput, "stage config has no stages");
  return stages;
}

std::string format_stage_config(const std::vector<CurriculumStage>& stages) {
  std::string out;
  for (const auto& s : stages)
    out += std::to_string(s.count) + " " + std::to_string(s.roll_length) + " " +
           std::to_string(s.num_orders) + " " + format_fraction(s.frac_min) + " " +
           format_fraction(s.frac_max) + "\n";
  return out;
}

namespace presets {

std::vector<CurriculumStage> full_curriculum() {
  const int table[10][2] = {{50, 50},  {50, 75},   {50, 100},  {50, 120},  {100, 75},
                            {100, 100}, {100, 120}, {100, 150}, {200, 125}, {200, 150}};
  std::vector<CurriculumStage> stages;
  for (const auto& row : table) stages.push_back({40, row[0], row[1], 0.1, 0.7});
  return stages;
}

std::vector<CurriculumStage> desk_curriculum() {
  return {{10, 20, 15, 0.1, 0.7}, {10, 30, 25, 0.1, 0.7}, {10, 50, 40, 0.1, 0.7}};
}

std::vector<CurriculumStage> desk_validation() {
  return {{2, 20, 15, 0.1, 0.7}, {2, 30, 25, 0.1, 0.7}, {2, 50, 40, 0.1, 0.7}};
}

std::vector<CurriculumStage> desk_test() {
  return {{10, 75, 60, 0.1, 0.7}, {10, 100, 80, 0.1, 0.7}};
}

}  // namespace presets

}  // namespace rlcg
