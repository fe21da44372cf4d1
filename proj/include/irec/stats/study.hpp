#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "irec/common/error.hpp"
#include "irec/stats/inference.hpp"

namespace irec::stats {

class EmptyGroup : public DataError {
 public:
  using DataError::DataError;
};

class InvalidRecord : public DataError {
 public:
  InvalidRecord(std::size_t row, const std::string& what);
  std::size_t row() const { return row_; }

 private:
  std::size_t row_;
};

// Questionnaire schema: U2 is asked in every group, the rest only in the
// groups that saw an explanation.
inline constexpr std::array<std::string_view, 8> kQuestions = {"U2", "T1", "T2", "E1",
                                                               "E2", "P1", "TR1", "S1"};
inline constexpr int kGroups = 4;
inline constexpr std::string_view kAllGroupsQuestion = "U2";

bool known_question(std::string_view question);
// Groups whose answers to `question` are compared: 0..3 for U2, 1..3 otherwise.
std::vector<int> eligible_groups(std::string_view question);

struct LikertRecord {
  std::string respondent;
  int group = 0;
  std::string question;
  int value = 0;
};

class LikertTable {
 public:
  // Throws DataError for an unknown question, a group outside 0..3, group 0
  // answering anything but U2, or a value outside 1..5.
  void add(LikertRecord record);

  const std::vector<LikertRecord>& records() const { return records_; }
  bool empty() const { return records_.empty(); }
  Sample values(int group, std::string_view question) const;

 private:
  std::vector<LikertRecord> records_;
};

// `respondent,group,question,value` with a header row. Values are integers
// 1..5 or scale labels (the opinion scale for U2, agreement otherwise).
// Errors carry the 1-based row number.
LikertTable parse_responses_text(std::string_view text);
LikertTable parse_responses(const std::filesystem::path& path);

struct Summary {
  double mean = 0.0;
  double median = 0.0;
  double prop_low = 0.0;  // share of values <= 2
  std::size_t n = 0;
};

// Throws EmptyGroup on an empty sample.
Summary summarize(const Sample& values);

struct SummaryRow {
  int group = 0;
  std::string question;
  Summary summary;
};

// One row per (group, question) present, question-schema order then group.
// Throws EmptyGroup on an empty table.
std::vector<SummaryRow> summarize(const LikertTable& table);

struct QuestionResult {
  std::string question;
  std::vector<int> groups;
  TestResult test;
  bool significant = false;
};

struct PairRow {
  std::string question;
  int group_a = 0;
  int group_b = 0;
  double z = 0.0;
  double p_adjusted = 1.0;
  bool significant = false;
};

struct EffectRow {
  std::string question;
  int group_a = 0;
  int group_b = 0;
  EffectSize effect;
};

struct LeveneRow {
  std::string question;
  TestResult test;
};

struct StudyReport {
  double alpha = 0.05;
  std::vector<QuestionResult> questions;
  std::vector<PairRow> pairs;
  std::vector<EffectRow> effects;
  std::vector<LeveneRow> levene;
  std::vector<SummaryRow> summary;
};

// Kruskal-Wallis per question over its eligible groups that have answers;
// Dunn for questions with p < alpha; Cliff's delta for pairs with adjusted
// p < alpha. A question whose answers are all identical is reported as H = 0,
// p = 1. Levene is run wherever every compared group has two or more answers.
StudyReport analyze_study(const LikertTable& table, double alpha = 0.05);

std::string_view interpretation(bool significant);

// question,H,p,interpretation
std::string table2_csv(const StudyReport& report);
// question,groupA,groupB,p_adjusted,interpretation
std::string table3_csv(const StudyReport& report);
// question,pair,delta,magnitude
std::string effects_csv(const StudyReport& report);
// group,question,n,mean,median,prop_low
std::string summary_csv(const StudyReport& report);
// question,W,df1,df2,p
std::string levene_csv(const StudyReport& report);

}  // namespace irec::stats
