#ifndef LPSIM_METRICS_HPP
#define LPSIM_METRICS_HPP

#include <array>
#include <filesystem>
#include <span>
#include <string>

#include "lpsim/terrain.hpp"

namespace lpsim {

// Found-location counts per category. Counts are stored as doubles so
// reference tables and scaled histograms share one type; they must be >= 0.
struct CategoryHistogram {
  std::array<double, kFoundCategoryCount> counts{};

  double total() const {
    double t = 0.0;
    for (const double c : counts) t += c;
    return t;
  }
  void add(FoundCategory cat, double n = 1.0) { counts[static_cast<std::size_t>(cat)] += n; }
};

// Symmetric Kullback-Leibler divergence between two same-length histograms:
// both are normalized to probability vectors, zero cells get additive
// smoothing eps = 1e-9 followed by renormalization, and the result is
//   sum p log(p/q) + sum q log(q/p).
// Throws CategoryMismatchError on length mismatch, EmptyInputError when a
// histogram has zero total.
double skl(std::span<const double> p, std::span<const double> q);
double skl(const CategoryHistogram& p, const CategoryHistogram& q);

// Per-category agreement against a reference, percentages and SKL together.
struct ComparisonReport {
  std::array<double, kFoundCategoryCount> found_pct{};
  std::array<double, kFoundCategoryCount> reference_pct{};
  std::array<double, kFoundCategoryCount> diff_points{};  // found - reference
  double skl_score = 0.0;

  std::string text() const;           // human-readable summary
  std::string machine_text() const;   // one "<category> <found> <ref> <diff>" line each + skl
  void write(const std::filesystem::path& out) const;  // machine_text to disk
};

ComparisonReport compare_to_reference(const CategoryHistogram& found,
                                      const CategoryHistogram& reference);

// Plain-text histogram file: one "<category_name> <count>" line per category,
// '#' comments allowed. Every category must appear exactly once; unknown,
// duplicate, or missing names raise CategoryMismatchError, negative counts
// FormatError.
CategoryHistogram load_category_histogram(const std::filesystem::path& file);
void save_category_histogram(const CategoryHistogram& h, const std::filesystem::path& file);

}  // namespace lpsim

#endif
