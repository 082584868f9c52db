#include "dschat/dataset/miniature.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <random>
#include <set>
#include <unordered_map>

#include "dschat/util/text.hpp"

namespace dschat::dataset {

namespace {

// Unbiased draw in [0, n); std distributions are not portable across standard libraries.
std::uint64_t draw_below(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
  for (;;) {
    const std::uint64_t v = rng();
    if (v < limit) return v % n;
  }
}

std::string escape_cell(const Cell& c) {
  if (!c) return "";
  std::string out;
  for (char ch : *c) {
    if (ch == '|') {
      out += "\\|";
    } else if (ch == '\n') {
      out += "\\n";
    } else if (ch == '\\') {
      out += "\\\\";
    } else {
      out.push_back(ch);
    }
  }
  return out;
}

std::string fraction(double v) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string render(const MiniDataset& m, std::size_t head_keep, std::size_t sample_keep) {
  std::string out = "# dataset: " + m.name + " (" + std::to_string(m.total_rows) + " rows, " +
                    std::to_string(m.header.size()) + " columns)\n";
  std::vector<std::string> escaped;
  for (const auto& h : m.header) escaped.push_back(escape_cell(h));
  out += util::join(escaped, "|") + "\n";
  const std::size_t head_total = std::min(kHeadRows, m.sample_rows.size());
  for (std::size_t i = 0; i < m.sample_rows.size(); ++i) {
    const bool is_head = i < head_total;
    if (is_head && i >= head_keep) continue;
    if (!is_head && i - head_total >= sample_keep) continue;
    std::vector<std::string> cells;
    for (const auto& c : m.sample_rows[i]) cells.push_back(escape_cell(c));
    out += util::join(cells, "|") + "\n";
  }
  out += "# stats:\n";
  for (const auto& s : m.stats) {
    out += escape_cell(s.name) + " (" + std::string(to_string(s.kind)) + "): missing=" + fraction(s.missing_fraction) +
           " distinct=" + std::to_string(s.distinct_count);
    if (s.min) out += " min=" + util::format_number(*s.min) + " max=" + util::format_number(*s.max);
    if (!s.top.empty()) {
      std::vector<std::string> parts;
      for (const auto& [v, n] : s.top) parts.push_back(escape_cell(v) + "(" + std::to_string(n) + ")");
      out += " top=" + util::join(parts, ",");
    }
    out += "\n";
  }
  return out;
}

}  // namespace

std::vector<std::size_t> seeded_sample(std::size_t lo, std::size_t hi, std::size_t count, std::uint64_t seed) {
  std::vector<std::size_t> picked;
  if (hi <= lo) return picked;
  const std::size_t n = hi - lo;
  count = std::min(count, n);
  std::mt19937_64 rng(seed);
  std::set<std::size_t> chosen;
  while (chosen.size() < count) chosen.insert(lo + static_cast<std::size_t>(draw_below(rng, n)));
  picked.assign(chosen.begin(), chosen.end());
  return picked;
}

std::vector<ColumnStats> column_stats(const Dataset& dataset) {
  std::vector<ColumnStats> out;
  const std::size_t rows = dataset.row_count();
  for (std::size_t c = 0; c < dataset.column_count(); ++c) {
    ColumnStats s;
    s.name = dataset.columns[c].name;
    s.kind = dataset.columns[c].kind;
    std::unordered_map<std::string, std::size_t> counts;
    std::size_t missing = 0;
    for (const auto& row : dataset.rows) {
      const Cell& cell = row[c];
      if (!cell) {
        ++missing;
        continue;
      }
      ++counts[*cell];
      if (s.kind == ColumnKind::numeric) {
        if (auto v = util::parse_number(*cell)) {
          s.min = s.min ? std::min(*s.min, *v) : *v;
          s.max = s.max ? std::max(*s.max, *v) : *v;
        }
      }
    }
    s.missing_fraction = rows ? static_cast<double>(missing) / static_cast<double>(rows) : 0.0;
    s.distinct_count = counts.size();
    if (s.kind != ColumnKind::numeric) {
      std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
      std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
      });
      if (ranked.size() > 3) ranked.resize(3);
      s.top = std::move(ranked);
    }
    out.push_back(std::move(s));
  }
  return out;
}

MiniDataset miniaturize(const Dataset& dataset, std::size_t budget_chars, std::uint64_t seed) {
  if (dataset.row_count() == 0) throw EmptyDataset();
  if (budget_chars < kMinBudget) {
    throw ValidationError("BudgetTooSmall", "budget must be at least " + std::to_string(kMinBudget) + " characters");
  }
  MiniDataset m;
  m.name = dataset.name;
  m.seed = seed;
  m.budget = budget_chars;
  m.total_rows = dataset.row_count();
  for (const auto& col : dataset.columns) m.header.push_back(col.name);

  const std::size_t head = std::min(kHeadRows, dataset.row_count());
  std::vector<std::size_t> indices;
  for (std::size_t i = 0; i < head; ++i) indices.push_back(i);
  for (std::size_t i : seeded_sample(head, dataset.row_count(), kSampleRows, seed)) indices.push_back(i);
  for (std::size_t i : indices) {
    m.sample_rows.push_back(dataset.rows[i]);
    m.sample_row_ids.push_back(dataset.row_ids.empty() ? i : dataset.row_ids[i]);
  }
  m.stats = column_stats(dataset);

  std::size_t head_keep = head;
  std::size_t sample_keep = indices.size() - head;
  std::string text = render(m, head_keep, sample_keep);
  while (text.size() > budget_chars && (sample_keep > 0 || head_keep > 0)) {
    if (sample_keep > 0) {
      --sample_keep;
    } else {
      --head_keep;
    }
    text = render(m, head_keep, sample_keep);
  }
  // Keep the structured fields consistent with what the text shows.
  std::vector<Row> kept_rows;
  std::vector<std::size_t> kept_ids;
  for (std::size_t i = 0; i < m.sample_rows.size(); ++i) {
    const bool keep = i < head ? i < head_keep : i - head < sample_keep;
    if (!keep) continue;
    kept_rows.push_back(m.sample_rows[i]);
    kept_ids.push_back(m.sample_row_ids[i]);
  }
  m.sample_rows = std::move(kept_rows);
  m.sample_row_ids = std::move(kept_ids);

  if (text.size() > budget_chars) {
    static const std::string marker = "\n# truncated\n";
    text.resize(budget_chars - marker.size());
    // Do not leave half a UTF-8 sequence behind.
    while (!text.empty() && (static_cast<unsigned char>(text.back()) & 0xC0) == 0x80) text.pop_back();
    if (!text.empty() && (static_cast<unsigned char>(text.back()) & 0x80)) text.pop_back();
    while (!text.empty() && text.back() == '\n') text.pop_back();
    text += marker;
    m.truncated = true;
  }
  m.rendered = std::move(text);
  return m;
}

}  // namespace dschat::dataset
