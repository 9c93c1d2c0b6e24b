#include "asitu/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "asitu/csv.hpp"

#include <fstream>

namespace asitu {

std::vector<RatingRecord> load_ratings_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open ratings CSV: " + path.string());
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("empty ratings CSV: " + path.string());
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto header = split_csv_line(line);
  for (auto& h : header)
    std::transform(h.begin(), h.end(), h.begin(),
                   [](unsigned char c) { return std::tolower(c); });
  if (header.size() != 3 || header[0] != "situation_id" ||
      header[1] != "valence" || header[2] != "arousal")
    throw std::runtime_error(path.string() +
                             ": ratings CSV must have header situation_id,valence,arousal");

  std::vector<RatingRecord> out;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 3)
      throw std::runtime_error(path.string() + ": row " + std::to_string(row) +
                               " must have 3 cells");
    RatingRecord r;
    r.situation_id = cells[0];
    try {
      r.valence = std::stod(cells[1]);
      r.arousal = std::stod(cells[2]);
    } catch (const std::exception&) {
      throw std::runtime_error(path.string() + ": non-numeric rating in row " +
                               std::to_string(row));
    }
    if (r.valence < -3.0 || r.valence > 3.0)
      throw std::runtime_error(path.string() + ": valence rating outside -3..3 in row " +
                               std::to_string(row));
    if (r.arousal < 0.0 || r.arousal > 6.0)
      throw std::runtime_error(path.string() + ": arousal rating outside 0..6 in row " +
                               std::to_string(row));
    out.push_back(std::move(r));
  }
  return out;
}

SamScalePair situation_label_summary(const LabelSeries& labels) {
  if (labels.size() == 0)
    throw std::invalid_argument("situation_label_summary: empty label series");
  const double n = static_cast<double>(labels.size());
  const double mean_v =
      std::accumulate(labels.valence.begin(), labels.valence.end(), 0.0) / n;
  const double mean_a =
      std::accumulate(labels.arousal.begin(), labels.arousal.end(), 0.0) / n;
  return to_sam_scale(mean_v, mean_a);
}

RmseReport rmse(std::span<const SamScalePair> predicted,
                std::span<const RatingRecord> truth) {
  if (predicted.size() != truth.size() || predicted.empty())
    throw std::invalid_argument("rmse: length mismatch or empty inputs");

  double sum_v = 0.0, sum_a = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double tv = truth[i].valence + 3.0;  // SAM valence shifted onto 0..6
    const double ta = truth[i].arousal;
    sum_v += (predicted[i].v6 - tv) * (predicted[i].v6 - tv);
    sum_a += (predicted[i].a6 - ta) * (predicted[i].a6 - ta);
  }
  RmseReport report;
  report.n = predicted.size();
  report.valence_rmse = std::sqrt(sum_v / static_cast<double>(report.n));
  report.arousal_rmse = std::sqrt(sum_a / static_cast<double>(report.n));
  report.valence_pct_range6 = 100.0 * (1.0 - report.valence_rmse / 6.0);
  report.arousal_pct_range6 = 100.0 * (1.0 - report.arousal_rmse / 6.0);
  report.valence_pct_range7 = 100.0 * (1.0 - report.valence_rmse / 7.0);
  report.arousal_pct_range7 = 100.0 * (1.0 - report.arousal_rmse / 7.0);
  return report;
}

namespace {

std::vector<double> midranks(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && x[order[j + 1]] == x[order[i]]) ++j;
    const double rank = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 3)
    throw std::invalid_argument("pearson: need equal lengths >= 3");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0)
    throw std::invalid_argument("pearson: zero variance input");
  return sxy / std::sqrt(sxx * syy);
}

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 3)
    throw std::invalid_argument("spearman: need equal lengths >= 3");
  const std::vector<double> rx = midranks(x);
  const std::vector<double> ry = midranks(y);
  return pearson(rx, ry);
}

}  // namespace asitu
