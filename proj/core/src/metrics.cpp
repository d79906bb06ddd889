#include "lpsim/metrics.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "lpsim/error.hpp"
#include "lpsim/text_io.hpp"

namespace lpsim {

namespace {

constexpr double kSmoothingEps = 1e-9;
constexpr std::size_t kN = static_cast<std::size_t>(kFoundCategoryCount);

std::vector<double> to_smoothed_probs(std::span<const double> counts, const char* side) {
  double total = 0.0;
  for (const double c : counts) {
    if (c < 0.0) throw FormatError("skl: negative count");
    total += c;
  }
  if (!(total > 0.0)) throw EmptyInputError(std::string("skl: ") + side + " histogram is empty");
  std::vector<double> p(counts.begin(), counts.end());
  bool smoothed = false;
  for (double& v : p) {
    v /= total;
    if (v == 0.0) {
      v = kSmoothingEps;
      smoothed = true;
    }
  }
  if (smoothed) {
    double t = 0.0;
    for (const double v : p) t += v;
    for (double& v : p) v /= t;
  }
  return p;
}

}  // namespace

double skl(std::span<const double> p_counts, std::span<const double> q_counts) {
  if (p_counts.size() != q_counts.size()) {
    throw CategoryMismatchError("skl: histograms have different lengths");
  }
  const std::vector<double> p = to_smoothed_probs(p_counts, "first");
  const std::vector<double> q = to_smoothed_probs(q_counts, "second");
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double lr = std::log(p[i] / q[i]);
    sum += p[i] * lr - q[i] * lr;  // p log(p/q) + q log(q/p)
  }
  return sum;
}

double skl(const CategoryHistogram& p, const CategoryHistogram& q) {
  return skl(std::span<const double>(p.counts), std::span<const double>(q.counts));
}

ComparisonReport compare_to_reference(const CategoryHistogram& found,
                                      const CategoryHistogram& reference) {
  const double ft = found.total();
  const double rt = reference.total();
  if (!(ft > 0.0)) throw EmptyInputError("compare_to_reference: found histogram is empty");
  if (!(rt > 0.0)) throw EmptyInputError("compare_to_reference: reference histogram is empty");
  ComparisonReport rep;
  for (std::size_t i = 0; i < kN; ++i) {
    rep.found_pct[i] = 100.0 * found.counts[i] / ft;
    rep.reference_pct[i] = 100.0 * reference.counts[i] / rt;
    rep.diff_points[i] = rep.found_pct[i] - rep.reference_pct[i];
  }
  rep.skl_score = skl(found, reference);
  return rep;
}

std::string ComparisonReport::text() const {
  std::ostringstream os;
  os << "category        simulated   reference   difference\n";
  for (std::size_t i = 0; i < kN; ++i) {
    const auto name = found_category_name(static_cast<FoundCategory>(i));
    os << name << std::string(16 - name.size(), ' ');
    char buf[64];
    std::snprintf(buf, sizeof buf, "%9.2f%% %10.2f%% %9.2f pts\n", found_pct[i],
                  reference_pct[i], std::fabs(diff_points[i]));
    os << buf;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "skl %.6f\n", skl_score);
  os << buf;
  return os.str();
}

std::string ComparisonReport::machine_text() const {
  std::string out;
  for (std::size_t i = 0; i < kN; ++i) {
    out += std::string(found_category_name(static_cast<FoundCategory>(i)));
    out += ' ';
    append_double(out, found_pct[i]);
    out += ' ';
    append_double(out, reference_pct[i]);
    out += ' ';
    append_double(out, diff_points[i]);
    out += '\n';
  }
  out += "skl ";
  append_double(out, skl_score);
  out += '\n';
  return out;
}

void ComparisonReport::write(const std::filesystem::path& out) const {
  std::ofstream f(out, std::ios::binary);
  if (!f) throw Error("cannot open for writing: " + out.string());
  const std::string body = machine_text();
  f.write(body.data(), static_cast<std::streamsize>(body.size()));
  if (!f) throw Error("write failed: " + out.string());
}

CategoryHistogram load_category_histogram(const std::filesystem::path& file) {
  std::ifstream f(file);
  if (!f) throw MissingInputError("cannot open histogram file: " + file.string());
  CategoryHistogram h;
  std::array<bool, kFoundCategoryCount> seen{};
  std::string line;
  while (std::getline(f, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string name, count_tok, extra;
    if (!(ls >> name)) continue;
    if (!(ls >> count_tok)) throw FormatError("histogram line missing count: " + line);
    if (ls >> extra) throw FormatError("trailing tokens on histogram line: " + line);
    FoundCategory cat;
    try {
      cat = parse_found_category(name);
    } catch (const FormatError&) {
      throw CategoryMismatchError("unknown category in histogram: " + name);
    }
    const auto idx = static_cast<std::size_t>(cat);
    if (seen[idx]) throw CategoryMismatchError("duplicate category in histogram: " + name);
    seen[idx] = true;
    const double count = parse_double(count_tok, "histogram count");
    if (count < 0.0) throw FormatError("negative count for category " + name);
    h.counts[idx] = count;
  }
  for (std::size_t i = 0; i < kN; ++i) {
    if (!seen[i]) {
      throw CategoryMismatchError(
          std::string("histogram missing category: ") +
          std::string(found_category_name(static_cast<FoundCategory>(i))));
    }
  }
  return h;
}

void save_category_histogram(const CategoryHistogram& h, const std::filesystem::path& file) {
  std::string out;
  for (std::size_t i = 0; i < kN; ++i) {
    out += std::string(found_category_name(static_cast<FoundCategory>(i)));
    out += ' ';
    append_double(out, h.counts[i]);
    out += '\n';
  }
  std::ofstream f(file, std::ios::binary);
  if (!f) throw Error("cannot open for writing: " + file.string());
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw Error("write failed: " + file.string());
}

}  // namespace lpsim
