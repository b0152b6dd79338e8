#include "statclaim/templates.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <regex>

#include "statclaim/error.hpp"

namespace statclaim {

namespace {

std::string trim_zeros(std::string s) {
  if (s.find('.') == std::string::npos) return s;
  while (!s.empty() && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

int display_decimals(double value) {
  const double a = std::fabs(value);
  if (a >= 100.0 || a == 0.0) return 0;
  if (a >= 1.0) return 2;
  const int d = 1 - static_cast<int>(std::floor(std::log10(a)));
  return std::min(d, 12);
}

std::string fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  return buf;
}

std::optional<double> to_double(const std::string& s) {
  double v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

int to_int(const std::string& s) { return std::stoi(s); }

const std::string kNum = R"((-?[0-9]+(?:\.[0-9]+)?))";

const std::regex& re_top_k() {
  static const std::regex r(R"(^(.+?) was among the (top|bottom) ([0-9]+) countries on (.+) in ([0-9]{4})\.$)");
  return r;
}
const std::regex& re_rank_form() {
  static const std::regex r(R"(^(.+?) ranked ([0-9]+)(?:st|nd|rd|th) among countries on (.+) in ([0-9]{4})\.$)");
  return r;
}
const std::regex& re_constant() {
  static const std::regex r(
      R"(^(.+?) has shown a constant (increase|decrease) on (.+) for ([0-9]+) consecutive years, as of ([0-9]{4})\.$)");
  return r;
}
const std::regex& re_extreme() {
  static const std::regex r(
      R"(^In ([0-9]{4}), (.+?) recorded its (highest|lowest) value on (.+) in the last ([0-9]+) years\.$)");
  return r;
}
const std::regex& re_rank_shift() {
  static const std::regex r(
      R"(^(.+?) went from rank ([0-9]+) to rank ([0-9]+) on (.+) between ([0-9]{4}) and ([0-9]{4})\.$)");
  return r;
}
const std::regex& re_change() {
  static const std::regex r("^(.+?) went from " + kNum + " to " + kNum +
                            R"( on (.+) between ([0-9]{4}) and ([0-9]{4})\.$)");
  return r;
}
const std::regex& re_trait() {
  static const std::regex r("^(.+?) recorded " + kNum + R"( on (.+) in ([0-9]{4})\.$)");
  return r;
}

/// Rank of `country` among rows of `year`: value descending, ties by name.
std::optional<std::pair<int, int>> rank_in(const std::vector<EvidenceRow>& rows, const std::string& country,
                                           int year) {
  std::vector<const EvidenceRow*> in_year;
  for (const auto& r : rows) {
    if (r.year == year) in_year.push_back(&r);
  }
  // Duplicate rows (the same point reported twice) count once.
  std::sort(in_year.begin(), in_year.end(), [](const EvidenceRow* a, const EvidenceRow* b) {
    if (a->value != b->value) return a->value > b->value;
    return a->country < b->country;
  });
  in_year.erase(std::unique(in_year.begin(), in_year.end(),
                            [](const EvidenceRow* a, const EvidenceRow* b) { return *a == *b; }),
                in_year.end());
  for (std::size_t i = 0; i < in_year.size(); ++i) {
    if (in_year[i]->country == country) {
      return std::pair{static_cast<int>(i) + 1, static_cast<int>(in_year.size())};
    }
  }
  return std::nullopt;
}

std::map<int, double> series_of(const std::vector<EvidenceRow>& rows, const std::string& country) {
  std::map<int, double> out;
  for (const auto& r : rows) {
    if (r.country == country) out[r.year] = r.value;
  }
  return out;
}

}  // namespace

std::string format_value(double value) {
  if (!std::isfinite(value)) return fixed(value, 0);
  const int d = display_decimals(value);
  std::string s = d == 0 ? fixed(std::round(value), 0) : trim_zeros(fixed(value, d));
  if (s == "-0") s = "0";
  return s;
}

bool values_agree(double stated, double actual) {
  if (format_value(stated) == format_value(actual)) return true;
  const double half_unit = 0.5 * std::pow(10.0, -display_decimals(actual));
  const double diff = std::fabs(stated - actual);
  return diff <= half_unit * (1 + 1e-9) || diff <= 0.005 * std::fabs(actual);
}

std::string ordinal(int n) {
  const int mod100 = n % 100;
  const int mod10 = n % 10;
  const char* suffix = "th";
  if (mod100 < 11 || mod100 > 13) {
    if (mod10 == 1) suffix = "st";
    else if (mod10 == 2) suffix = "nd";
    else if (mod10 == 3) suffix = "rd";
  }
  return std::to_string(n) + suffix;
}

std::string measure_phrase(const DataSample& sample) {
  auto label = sample.combination.label();
  return label.empty() ? sample.table_id : label;
}

std::string render_template(const DataSample& sample, Language language) {
  if (language != Language::En) {
    throw Error(ErrorCode::UnsupportedTemplateLanguage,
                "templates are English-only; got " + std::string(to_string(language)));
  }
  return render_parsed(expected_fields(sample));
}

std::string render_top_k_rank_form(const DataSample& sample, int rank) {
  auto c = expected_fields(sample);
  c.rank_form = true;
  c.rank = rank;
  return render_parsed(c);
}

std::string render_parsed(const ParsedClaim& c) {
  const std::string& m = c.measure;
  const std::string y = std::to_string(c.year);
  const std::string yb = std::to_string(c.year_b);
  const std::string dir(to_string(c.direction));
  switch (c.type) {
    case ClaimType::TopK:
      if (c.rank_form) return c.country + " ranked " + ordinal(c.rank) + " among countries on " + m + " in " + y + ".";
      return c.country + " was among the " + dir + " " + std::to_string(c.k) + " countries on " + m + " in " + y + ".";
    case ClaimType::ConstantChange:
      return c.country + " has shown a constant " + dir + " on " + m + " for " + std::to_string(c.n_years) +
             " consecutive years, as of " + y + ".";
    case ClaimType::HistoricalExtreme:
      return "In " + y + ", " + c.country + " recorded its " + dir + " value on " + m + " in the last " +
             std::to_string(c.n_years) + " years.";
    case ClaimType::ChangeInRank:
      return c.country + " went from rank " + std::to_string(c.rank) + " to rank " + std::to_string(c.rank_b) +
             " on " + m + " between " + y + " and " + yb + ".";
    case ClaimType::ChangeOverTime:
      return c.country + " went from " + c.value_text + " to " + c.value_b_text + " on " + m + " between " + y +
             " and " + yb + ".";
    case ClaimType::HaveTrait:
      return c.country + " recorded " + c.value_text + " on " + m + " in " + y + ".";
  }
  return {};
}

std::optional<ParsedClaim> parse_template(const std::string& text) {
  std::smatch m;
  ParsedClaim c;
  if (std::regex_match(text, m, re_extreme())) {
    c.type = ClaimType::HistoricalExtreme;
    c.year = to_int(m[1]);
    c.country = m[2];
    c.direction = *parse_direction(m[3].str());
    c.measure = m[4];
    c.n_years = to_int(m[5]);
    return c;
  }
  if (std::regex_match(text, m, re_top_k())) {
    c.type = ClaimType::TopK;
    c.country = m[1];
    c.direction = *parse_direction(m[2].str());
    c.k = to_int(m[3]);
    c.measure = m[4];
    c.year = to_int(m[5]);
    return c;
  }
  if (std::regex_match(text, m, re_rank_form())) {
    c.type = ClaimType::TopK;
    c.rank_form = true;
    c.country = m[1];
    c.rank = to_int(m[2]);
    c.measure = m[3];
    c.year = to_int(m[4]);
    return c;
  }
  if (std::regex_match(text, m, re_constant())) {
    c.type = ClaimType::ConstantChange;
    c.country = m[1];
    c.direction = *parse_direction(m[2].str());
    c.measure = m[3];
    c.n_years = to_int(m[4]);
    c.year = to_int(m[5]);
    return c;
  }
  if (std::regex_match(text, m, re_rank_shift())) {
    c.type = ClaimType::ChangeInRank;
    c.country = m[1];
    c.rank = to_int(m[2]);
    c.rank_b = to_int(m[3]);
    c.measure = m[4];
    c.year = to_int(m[5]);
    c.year_b = to_int(m[6]);
    return c;
  }
  if (std::regex_match(text, m, re_change())) {
    c.type = ClaimType::ChangeOverTime;
    c.country = m[1];
    c.value_text = m[2];
    c.value_b_text = m[3];
    c.measure = m[4];
    c.year = to_int(m[5]);
    c.year_b = to_int(m[6]);
    return c;
  }
  if (std::regex_match(text, m, re_trait())) {
    c.type = ClaimType::HaveTrait;
    c.country = m[1];
    c.value_text = m[2];
    c.measure = m[3];
    c.year = to_int(m[4]);
    return c;
  }
  return std::nullopt;
}

ParsedClaim expected_fields(const DataSample& sample) {
  ParsedClaim c;
  c.type = sample.claim_type;
  c.measure = measure_phrase(sample);
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        c.country = p.country;
        if constexpr (std::is_same_v<T, TopKPayload>) {
          c.direction = p.direction;
          c.k = p.k;
          c.year = p.year;
        } else if constexpr (std::is_same_v<T, ConstantChangePayload>) {
          c.direction = p.direction;
          c.n_years = p.n_years;
          c.year = p.end.year;
        } else if constexpr (std::is_same_v<T, HistoricalExtremePayload>) {
          c.direction = p.direction;
          c.n_years = p.n_years;
          c.year = p.year;
        } else if constexpr (std::is_same_v<T, ChangeInRankPayload>) {
          c.rank = p.rank_a;
          c.rank_b = p.rank_b;
          c.year = p.year_a;
          c.year_b = p.year_b;
        } else if constexpr (std::is_same_v<T, ChangeOverTimePayload>) {
          c.value_text = format_value(p.value_a);
          c.value_b_text = format_value(p.value_b);
          c.year = p.year_a;
          c.year_b = p.year_b;
        } else {
          c.value_text = format_value(p.value);
          c.year = p.year;
        }
      },
      sample.payload);
  return c;
}

std::optional<bool> claim_holds(const ParsedClaim& claim, const std::vector<EvidenceRow>& rows) {
  const auto series = series_of(rows, claim.country);
  if (series.empty()) return std::nullopt;

  switch (claim.type) {
    case ClaimType::HaveTrait: {
      auto it = series.find(claim.year);
      if (it == series.end()) return std::nullopt;
      auto stated = to_double(claim.value_text);
      return stated && values_agree(*stated, it->second);
    }
    case ClaimType::ChangeOverTime: {
      auto a = series.find(claim.year);
      auto b = series.find(claim.year_b);
      if (a == series.end() || b == series.end()) return std::nullopt;
      auto sa = to_double(claim.value_text);
      auto sb = to_double(claim.value_b_text);
      return sa && sb && values_agree(*sa, a->second) && values_agree(*sb, b->second);
    }
    case ClaimType::TopK: {
      auto r = rank_in(rows, claim.country, claim.year);
      if (!r) return std::nullopt;
      const auto [rank, n] = *r;
      if (claim.rank_form) return rank == claim.rank;
      const int position = claim.direction == Direction::Top ? rank : n - rank + 1;
      return position <= claim.k;
    }
    case ClaimType::ChangeInRank: {
      auto ra = rank_in(rows, claim.country, claim.year);
      auto rb = rank_in(rows, claim.country, claim.year_b);
      if (!ra || !rb) return std::nullopt;
      return ra->first == claim.rank && rb->first == claim.rank_b;
    }
    case ClaimType::ConstantChange: {
      if (claim.n_years < 2) return false;
      const int first = claim.year - claim.n_years + 1;
      for (int y = first; y < claim.year; ++y) {
        auto a = series.find(y);
        auto b = series.find(y + 1);
        if (a == series.end() || b == series.end()) return false;
        const bool step = claim.direction == Direction::Increase ? b->second > a->second
                                                                 : b->second < a->second;
        if (!step) return false;
      }
      return true;
    }
    case ClaimType::HistoricalExtreme: {
      auto at = series.find(claim.year);
      if (at == series.end()) return std::nullopt;
      const double v = at->second;
      const int window_start = claim.year - claim.n_years + 1;
      // The rows must reach back to the start of the claimed window.
      if (series.begin()->first > window_start) return false;
      for (const auto& [year, value] : series) {
        if (year < window_start || year >= claim.year) continue;
        const bool beaten = claim.direction == Direction::Highest ? value >= v : value <= v;
        if (beaten) return false;
      }
      return true;
    }
  }
  return std::nullopt;
}

}  // namespace statclaim
