#include "irec/explain/templates.hpp"

#include "irec/common/error.hpp"

namespace irec::explain {

namespace {

constexpr std::string_view kUserTypes = R"PROMPT(We have a recommendation system based on matrix factorization, capable of generating recommendations. We aim to interpret the user types.
The matrix X (containing ratings between 1 and 5) has dimensions (movies x users). We decompose it as follows: X = W * H, where W has dimensions (movies x latent factors) and H has dimensions (latent factors x users).
A rating above 4 is considered very good. A rating of 3 is acceptable. A rating below 3 indicates less interesting movies for the latent user.
The values in W fall within the same range as those in X. Each column of W represents a user type. Each column of H sums up to 1.
Your role is to interpret the user types.
For each user type, provide a description in a maximum of 100 words. Base your explanation on all the movies associated with the user type.
It is very important that the descriptions of the user types are explicit and different.
Each user type's description should neither be too obvious nor too generalistic, in order to obtain distinctive and characteristic user types.
We provide you with a column of W. Do not list too many liked movies to describe the user type, but rather focus on the characteristics of these movies... You can mention 2–3 movies if necessary, but do not make a long list of liked movies.
Be careful not to say that a user type likes a movie if that movie has a rating below 4.
If you realize that your descriptions for two (or more) user types are too similar, it means you are not distinguishing them enough. Focus on what really differentiates them.
Please reason step by step, and put your final answer within \boxed{}.
)PROMPT";

constexpr std::string_view kModelBased = R"PROMPT(We use a recommendation system based on matrix factorization to suggest relevant movies based on user preferences.

How it works:
- The matrix X (movies x users) contains ratings from 1 to 5.
- We decompose it as X = W * H, where:
    - W (movies x latent factors) represents ratings from user types.
    - H (latent factors x users) weights the influence of each user type for a given user (each colum of H sum up to 1).
- A movie's final score is a weighted average of evaluations from multiple user types.

Your task:
- Explain why this movie might appeal to the user without mentioning matrix factorization or user type weightings.
- Highlight broad trends rather than linking the recommendation to a single user type.

Guidelines:
- Justify the recommendation in a maximum of two sentences.
- Emphasize thematic, tonal, stylistic, or emotional similarities rather than just genre overlap.
- Adopt a natural, professional, and engaging tone.
- Frame the explanation as insightful advice, not a film summary.
- Avoid robotic or generic phrasing.
- Express measured enthusiasm to spark interest without exaggeration.
- Please reason step by step, and put your final answer within \boxed{}.

Final Goal:
- The recommendation should feel meaningful, not generic.
- The explanation should spark curiosity and interest.
- Reflect a mix of preferences, not a single user type’s perspective.

Finally, translate everything into French and use the informal "tu" form. At the end, we only want the French final answer in the box. Do not add information, just the final answer.
)PROMPT";

constexpr std::string_view kHistoryBased = R"PROMPT(We generate a personalized explanation to help the user understand why a recommended movie might be a good match.

How it works:
- The explanation is based on:
    - The title of the recommended movie.
    - Its genres.
    - The titles and genres of movies the user has previously watched and rated highly (at least 4 stars).
- The goal is to highlight meaningful connections between past preferences and this recommendation, without mentioning an algorithm.

Your task:
- Justify the recommendation in a maximum of two sentences.
- Emphasize thematic, tonal, stylistic, or emotional similarities rather than just genre overlap.
- Adopt a natural, professional, and engaging tone.
- Frame the explanation as insightful advice, not a film summary.
- Avoid robotic or generic phrasing.
- Express measured enthusiasm to spark interest without exaggeration.
- Please reason step by step, and put your final answer within \boxed{}.

Final goal:
- The explanation should feel relevant and meaningful to the user.
- It should spark curiosity and encourage them to watch the movie.

Finally, translate everything into French and use the informal "tu" form. At the end, we only want the French final answer in the box. Do not add information, just the final answer.
)PROMPT";

constexpr std::string_view kCombined = R"PROMPT(We use a recommendation system based on matrix factorization to suggest relevant movies based on user preferences.

How it works:
- The matrix X (movies x users) contains ratings from 1 to 5.
- We decompose it as X = W * H, where:
    - W (movies x latent factors) represents ratings from user types.
    - H (latent factors x users) weights the influence of each user type for a given user (each column of H sums up to 1).
- A movie's final score is a weighted average of evaluations from multiple user types.
- In addition to this approach, we consider the user's history of highly rated movies (score ≥ 4) to refine the explanation.
- This means the reasoning should not only reflect general trends from user types but also highlight connections with movies the user has previously enjoyed.

Your task:
- Explain why this movie might appeal to the user without mentioning matrix factorization or user type weightings.
- Justify the recommendation in a maximum of two sentences.
- Emphasize thematic, tonal, stylistic, or emotional similarities rather than just genre overlap.
- When possible, draw meaningful parallels with movies the user has highly rated to reinforce the recommendation.
- Adopt a natural, professional, and engaging tone.
- Frame the explanation as insightful advice, not a film summary.
- Avoid robotic or generic phrasing.
- Express measured enthusiasm to spark interest without exaggeration.
- Please reason step by step, and put your final answer within \boxed{}.

Final goal:
- The explanation should feel relevant and meaningful to the user.
- It should spark curiosity and encourage them to watch the movie.
- Reflect a mix of preferences, not a single user type’s perspective while incorporating insights from the user's past interests.

Finally, translate everything into French and use the informal "tu" form. At the end, we only want the French final answer in the box. Do not add information, just the final answer.
)PROMPT";

constexpr std::string_view kTranslationClause =
    "Finally, translate everything into French and use the informal \"tu\" form. "
    "At the end, we only want the French final answer in the box. "
    "Do not add information, just the final answer.\n";
constexpr std::string_view kNeutralClause =
    "At the end, we only want the final answer in the box. "
    "Do not add information, just the final answer.\n";

}  // namespace

std::string_view to_string(Strategy strategy) {
  switch (strategy) {
    case Strategy::UserTypes:
      return "user-types";
    case Strategy::ModelBased:
      return "model";
    case Strategy::HistoryBased:
      return "history";
    case Strategy::Combined:
      return "combined";
  }
  return "unknown";
}

Strategy parse_strategy(std::string_view name) {
  for (const Strategy s : {Strategy::UserTypes, Strategy::ModelBased,
                           Strategy::HistoryBased, Strategy::Combined}) {
    if (name == to_string(s)) return s;
  }
  throw ConfigError("unknown explanation strategy '" + std::string(name) +
                    "' (expected user-types, model, history or combined)");
}

std::string system_template(Strategy strategy, bool keep_translation) {
  std::string_view base;
  switch (strategy) {
    case Strategy::UserTypes:
      base = kUserTypes;
      break;
    case Strategy::ModelBased:
      base = kModelBased;
      break;
    case Strategy::HistoryBased:
      base = kHistoryBased;
      break;
    case Strategy::Combined:
      base = kCombined;
      break;
  }
  std::string text(base);
  if (!keep_translation) {
    const auto at = text.rfind(kTranslationClause);
    if (at != std::string::npos) text.replace(at, kTranslationClause.size(), kNeutralClause);
  }
  return text;
}

}  // namespace irec::explain
