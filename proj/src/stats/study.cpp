#include "irec/stats/study.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>
#include <sstream>

#include <fmt/format.h>

#include "irec/common/csv.hpp"
#include "irec/common/files.hpp"
#include "irec/data/likert.hpp"

namespace irec::stats {

InvalidRecord::InvalidRecord(std::size_t row, const std::string& what)
    : DataError(fmt::format("responses row {}: {}", row, what)), row_(row) {}

bool known_question(std::string_view question) {
  return std::find(kQuestions.begin(), kQuestions.end(), question) != kQuestions.end();
}

std::vector<int> eligible_groups(std::string_view question) {
  if (question == kAllGroupsQuestion) return {0, 1, 2, 3};
  return {1, 2, 3};
}

void LikertTable::add(LikertRecord record) {
  if (!known_question(record.question)) {
    throw DataError(fmt::format("unknown question '{}'", record.question));
  }
  if (record.group < 0 || record.group >= kGroups) {
    throw DataError(fmt::format("group {} outside 0..{}", record.group, kGroups - 1));
  }
  if (record.group == 0 && record.question != kAllGroupsQuestion) {
    throw DataError(fmt::format("group 0 only answers {}, not {}", kAllGroupsQuestion,
                                record.question));
  }
  if (record.value < 1 || record.value > 5) {
    throw DataError(fmt::format("value {} outside 1..5", record.value));
  }
  records_.push_back(std::move(record));
}

Sample LikertTable::values(int group, std::string_view question) const {
  Sample out;
  for (const auto& r : records_) {
    if (r.group == group && r.question == question) out.push_back(r.value);
  }
  return out;
}

namespace {

int parse_value(const std::string& field, const std::string& question) {
  int value = 0;
  const auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec == std::errc() && end == field.data() + field.size()) return value;
  const auto& scale = question == kAllGroupsQuestion ? data::LikertScale::opinion()
                                                     : data::LikertScale::agreement();
  return data::likert_to_score(field, scale);
}

}  // namespace

LikertTable parse_responses_text(std::string_view text) {
  LikertTable table;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::vector<std::string> fields;
  std::size_t row = 0;
  bool saw_header = false;
  while (std::getline(in, raw)) {
    ++row;
    const auto line = csv::chomp(raw);
    if (line.empty()) continue;
    if (!saw_header) {
      saw_header = true;
      continue;
    }
    if (!csv::split_line(line, fields) || fields.size() != 4) {
      throw InvalidRecord(row, "expected respondent,group,question,value");
    }
    LikertRecord record;
    record.respondent = fields[0];
    const auto& g = fields[1];
    if (std::from_chars(g.data(), g.data() + g.size(), record.group).ec != std::errc()) {
      throw InvalidRecord(row, "group is not an integer");
    }
    record.question = fields[2];
    try {
      record.value = parse_value(fields[3], record.question);
      table.add(std::move(record));
    } catch (const DataError& e) {
      throw InvalidRecord(row, e.what());
    }
  }
  if (!saw_header) throw EmptyGroup("responses file is empty");
  return table;
}

LikertTable parse_responses(const std::filesystem::path& path) {
  return parse_responses_text(read_file(path));
}

Summary summarize(const Sample& values) {
  if (values.empty()) throw EmptyGroup("cannot summarize an empty group");
  Summary s;
  s.n = values.size();
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(s.n);
  Sample sorted = values;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = s.n / 2;
  s.median = s.n % 2 == 1 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
  const auto low = std::count_if(values.begin(), values.end(), [](double v) { return v <= 2.0; });
  s.prop_low = static_cast<double>(low) / static_cast<double>(s.n);
  return s;
}

std::vector<SummaryRow> summarize(const LikertTable& table) {
  if (table.empty()) throw EmptyGroup("response table is empty");
  std::vector<SummaryRow> rows;
  for (const auto question : kQuestions) {
    for (int group = 0; group < kGroups; ++group) {
      const Sample values = table.values(group, question);
      if (values.empty()) continue;
      rows.push_back({group, std::string(question), summarize(values)});
    }
  }
  return rows;
}

StudyReport analyze_study(const LikertTable& table, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  StudyReport report;
  report.alpha = alpha;
  report.summary = summarize(table);

  for (const auto question : kQuestions) {
    std::vector<int> groups;
    std::vector<Sample> samples;
    for (const int g : eligible_groups(question)) {
      Sample values = table.values(g, question);
      if (values.empty()) continue;
      groups.push_back(g);
      samples.push_back(std::move(values));
    }
    if (samples.empty()) continue;

    QuestionResult result;
    result.question = std::string(question);
    result.groups = groups;
    try {
      result.test = kruskal_wallis(samples);
    } catch (const AllValuesTied&) {
      result.test = TestResult{0.0, 1.0, static_cast<double>(samples.size()) - 1.0, 0.0,
                               "kruskal-wallis"};
    }
    result.significant = result.test.p_value < alpha;
    report.questions.push_back(result);

    const bool spread = std::all_of(samples.begin(), samples.end(),
                                    [](const Sample& s) { return s.size() >= 2; });
    if (spread && samples.size() >= 2) {
      report.levene.push_back({result.question, levene(samples)});
    }

    if (!result.significant) continue;
    for (const auto& pair : dunn_posthoc(samples)) {
      PairRow row{result.question, groups[pair.group_a], groups[pair.group_b],
                  pair.z,          pair.p_adjusted,      pair.p_adjusted < alpha};
      report.pairs.push_back(row);
      if (row.significant) {
        report.effects.push_back({result.question, row.group_a, row.group_b,
                                  cliffs_delta(samples[pair.group_a], samples[pair.group_b])});
      }
    }
  }
  return report;
}

std::string_view interpretation(bool significant) {
  return significant ? "Significant" : "Not significant";
}

std::string table2_csv(const StudyReport& report) {
  std::string out = "question,H,p,interpretation\n";
  for (const auto& q : report.questions) {
    out += fmt::format("{},{:.6f},{:.6f},{}\n", q.question, q.test.statistic, q.test.p_value,
                       interpretation(q.significant));
  }
  return out;
}

std::string table3_csv(const StudyReport& report) {
  std::string out = "question,groupA,groupB,p_adjusted,interpretation\n";
  for (const auto& p : report.pairs) {
    out += fmt::format("{},{},{},{:.6f},{}\n", p.question, p.group_a, p.group_b, p.p_adjusted,
                       interpretation(p.significant));
  }
  return out;
}

std::string effects_csv(const StudyReport& report) {
  std::string out = "question,pair,delta,magnitude\n";
  for (const auto& e : report.effects) {
    out += fmt::format("{},{}-{},{:.6f},{}\n", e.question, e.group_a, e.group_b, e.effect.delta,
                       to_string(e.effect.magnitude));
  }
  return out;
}

std::string summary_csv(const StudyReport& report) {
  std::string out = "group,question,n,mean,median,prop_low\n";
  for (const auto& row : report.summary) {
    const auto& s = row.summary;
    out += fmt::format("{},{},{},{:.6f},{:.6f},{:.6f}\n", row.group, row.question, s.n, s.mean,
                       s.median, s.prop_low);
  }
  return out;
}

std::string levene_csv(const StudyReport& report) {
  std::string out = "question,W,df1,df2,p\n";
  for (const auto& row : report.levene) {
    out += fmt::format("{},{:.6f},{},{},{:.6f}\n", row.question, row.test.statistic, row.test.df,
                       row.test.df2, row.test.p_value);
  }
  return out;
}

}  // namespace irec::stats
