// Task table for the builtin registry. Instruction texts must stay
// byte-identical to templates/<task_id>.txt (checked by the test suite).

#include "registry_data.hpp"

namespace socinstruct::detail {

std::vector<TaskSpec> builtin_tasks() {
  std::vector<TaskSpec> tasks;
  tasks.reserve(26);

  {
    TaskSpec t;
    t.task_id = "sentiment";
    t.display_name = "Sentiment";
    t.category = Category::sentiment_emotion;
    t.role = Role::seen;
    t.label_set = {"positive", "negative", "neutral"};
    t.instruction_text = R"tpl(Evaluate the sentiment conveyed in the input text and determine whether it is positive, negative, or neutral. This sentiment assessment should encompass the overall sentiment of the event described within the context of the topic mentioned in the text. Your options for classification are confined to positive, negative or neutral.)tpl";
    t.input_template = "{text}";
    t.expected_splits = {{Split::train, 8000}, {Split::validation, 2000}, {Split::test, 12284}};
    t.cap = 8000;
    tasks.push_back(std::move(t));
  }
  {
    TaskSpec t;
    t.task_id = "emotion";
    t.display_name = "Emotion";
    t.category = Category::sentiment_emotion;
    t.role = Role::seen;
    t.label_set = {"anger", "joy", "optimism", "sadness"};
    t.instruction_text = R"tpl(Analyze the following sentence and determine the predominant emotion it displays. Your options for classification are confined to anger, joy, optimism, or sadness. Please select one emotion from the given alternatives that you believe best epitomizes the emotional context of the sentence.)tpl";
    t.input_template = "{text}";
    t.expected_splits = {{Split::train, 3257}, {Split::validation, 374}, {Split::test, 1421}};
    tasks.push_back(std::move(t));
  }
  {
    TaskSpec t;
    t.task_id = "valence_cls";
    t.display_name = "ValenceCLS";
    t.category = Category::sentiment_emotion;
    t.role = Role::seen;
    t.label_set = {"Low Valence", "High Valence"};
    t.instruction_text = R"tpl(Analyze the provided text using the Valence-Arousal-Dominance model for emotional assessment. Your task is to classify the valence level it would likely elicit in an average reader, where 'Low Valence' indicates a low level of pleasant feelings and 'High Valence' indicates a high level of pleasant feelings. Remember, the valence scale is used to measure the degree of pleasure or displeasure a person may feel towards something. Your options for classification are confined to 'Low Valence' or 'High Valence'.)tpl";
    t.input_template = "{text}";
    t.reframing = ThresholdRule{4.0, "High Valence", "Low Valence", "Low Valence"};
    t.expected_splits = {{Split::train, 9002}, {Split::validation, 510}, {Split::test, 550}};
    tasks.push_back(std::move(t));
  }
  {
    TaskSpec t;
    t.task_id = "arousal_cls";
    t.display_name = "ArousalCLS";
    t.category = Category::sentiment_emotion;
    t.role = Role::seen;
    t.label_set = {"Low Arousal", "High Arousal"};
    t.instruction_text = R"tpl(Analyze the provided text using the Valence-Arousal-Dominance (VAD) emotional model. Your task is to classify the arousal level it might trigger in an average reader. Arousal, in this context, refers to the degree of energy or lethargy the text might induce. 'Low Arousal' indicates a low arousal level, suggesting the text is likely to make the reader feel calm or lethargic. Conversely, 'High Arousal' indicates a high arousal level, suggesting the tweet is likely to energize or excite the reader. Your options for classification are confined to 'Low Arousal' or 'High Arousal'.)tpl";
    t.input_template = "{text}";
    t.reframing = ThresholdRule{4.0, "High Arousal", "Low Arousal", "Low Arousal"};
    t.expected_splits = {{Split::train, 9002}, {Split::validation, 510}, {Split::test, 550}};
    tasks.push_back(std::move(t));
  }
  {
    TaskSpec t;
    t.task_id = "dominance_cls";
    t.display_name = "DominanceCLS";
    t.category = Category::sentiment_emotion;
    t.role = Role::seen;
    t.label_set = {"Low Dominance", "High Dominance"};
    t.instruction_text = R"tpl(Please analyze the provided text using the Valence-Arousal-Dominance (VAD) model for emotional response. Specifically, we're interested in the Dominance aspect of this model. This involves assessing the level of control or dominance the text might make an average reader feel, versus feelings of being controlled or submissive.\nPlease classify this dominance level as 'Low Dominance' or 'High dominance'. 'Low Dominance' indicates that the text is likely to evoke a low level of dominance or control in the reader, making them feel more submissive or controlled. Conversely, 'High Dominance' suggests that the text would make the reader feel highly dominant or in control.\nYour options for classification are confined to 'Low Dominance' or 'High Dominance'.)tpl";
    t.input_template = "{text}";
    t.reframing = ThresholdRule{4.0, "High Dominance", "Low Dominance", "Low Dominance"};
    t.expected_splits = {{Split::train, 9002}, {Split::validation, 510}, {Split::test, 550}};
    tasks.push_back(std::move(t));
  }
  {
    TaskSpec t;
    t.task_id = "empathy_explorations";
    t.display_name = "EmpathyExplorations";
    t.category = Category::other_social;
    t.role = Role::seen;
    t.label_set = {"Strong Exploration", "Weak Exploration", "No Exploration"};
    t.instruction_text = R"tpl(Evaluate the degree of inquiry exhibited in the counselor's response provided below, categorizing it as either "Strong Exploration", "Weak Exploration" or "No Exploration". We define 'exploration' as instances where a mental health counselor displays keen interest in a patient by asking about experiences that haven't been explicitly mentioned.)tpl";
    t.input_template = "Patient: {patient}\nCounselor's response: {counselor}";
    t.expected_splits = {{Split::train, 2220}, {Split::validation, 247}, {Split::test, 617}};
    tasks.push_back(std::move(t));
  }
  {
    TaskSpec t;
    t.task_id = "empathy_self_rated";
    t.display_name = "EmpathySelfRated";
    t.category = Category::other_social;
    t.role = Role::seen;
    t.label_set = {"low empathy", "high empathy"};
    t.instruction_text = R"tpl(Please carefully peruse the subsequent text, which is a personal account penned by an individual expressing their emotions and reflections after reading a news article. This account is directed towards their friends. After reading, your task is to accurately classify the level of empathetic concern demonstrated by the author. Your options for classification are 'low empathy' which indicates low empathetic concern or 'high empathy' which signifies a high degree of empathetic concern.)tpl";
    t.input_template = "{text}";
    t.expected_splits = {{Split::train, 1487}, {Split::validation, 186}, {Split::test, 186}};
    tasks.push_back(std::move(t));
  }
  {
    TaskSpec t;
    t.task_id = "distress_self_rated";
    t.display_name = "DistressSelfRated";
    t.category = Category::other_social;
    t.role = Role::seen;
    t.label_set = {"low distress", "high distress"};
    t.instruction_text = R"tpl(Please carefully peruse the subsequent text, which is a personal account written by an individual to their friends. This account details their emotional reactions and cognitive responses upon reading a specific news article. Your task is to accurately classify the level of personal distress experienced by the author. Your options for classification are 'low distress' or 'high distress'.)tpl";
    t.input_template = "{text}";
    t.expected_splits = {{Split::train, 1487}, {Split::validation, 186}, {Split::test, 186}};
    tasks.push_back(std::move(t));
  }
  {
    TaskSpec t;
    t.task_id = "flute";
    t.display_name = "FLUTE";
    t.category = Category::other_social;
    t.role = Role::seen;
    t.label_set = {"Idiom", "Metaphor", "Sarcasm", "Simile"};
    t.instruction_text = R"tpl(Please follow these steps:

1. First, you'll be presented with a premise and a hypothesis in the input section.

2. Your task is to determine and categorize the type of figurative language utilized in the hypothesis.

3. Finally, based on your assessment, respond with a single answer that most accurately represents the figurative language detected in the hypothesis. Choose from these four classifications: Idiom, Metaphor, Sarcasm, or Simile.)tpl";
    t.input_template = "Premise: {premise}\n\nHypothesis: {hypothesis}";
    t.expected_splits = {{Split::train, 6780}, {Split::validation, 754}, {Split::test, 1498}};
    tasks.push_back(std::move(t));
  }
  {
    TaskSpec t;
    t.task_id = "hyperbole";
    t.display_name = "Hyperbole";
    t.category = Category::trustworthiness;
    t.role = Role::seen;
    t.label_set = {"hyperbole", "not hyperbole"};
    t.instruction_text = R"tpl(Upon receiving a piece of text, your task is to analyze and determine whether it contains hyperbolic language, which is an exaggerated statement or claim not meant to be taken literally, or if it does not. Your options for classification are confined to 'hyperbole' or 'not hyperbole'.)tpl";
    t.input_template = "{text}";
    t.expected_splits = {{Split::train, 2580}, {Split::validation, 323}, {Split::test, 323}};
    tasks.push_back(std::move(t));
  }
  {
    TaskSpec t;
    t.task_id = "same_side_stance";
    t.display_name = "SameSideStance";
    t.category = Category::sentiment_emotion;
    t.role = Role::seen;
    t.label_set = {"same side", "not same side"};
    t.instruction_text = R"tpl(You are provided with two pieces of text sourced from an online debate forum. Your task is to analyze and categorize these texts based on their argumentative stance. Determine whether both texts are arguing in favor of the same viewpoint or if they are opposing each other. Your options for classification are confined to 'same side' or 'not same side'.)tpl";
    t.input_template = "{a} [SEP] {b}";
    t.expected_splits = {{Split::train, 140}, {Split::validation, 18}, {Split::test, 17}};
    tasks.push_back(std::move(t));
  }
  {
    TaskSpec t;
    t.task_id = "humor";
    t.display_name = "Humor";
    t.category = Category::humor;
    t.role = Role::seen;
    t.label_set = {"humorous", "non-humorous"};
    t.instruction_text = R"tpl(Upon receiving a piece of text, your task is to analyze and determine whether the intention of the text was to be humorous. You are instructed to look at the text and identify the structure of the joke, e.g. setup and punchline, or the content of the joke, e.g. absurdity, in order to determine if the intention of the text was to be humorous. If you think the intention of the text was to be humorous, classify it as 'humorous', else classfy it as 'non-humorous'.)tpl";
    t.input_template = "{text}";
    t.expected_splits = {{Split::train, 8000}, {Split::validation, 1000}, {Split::test, 1000}};
    tasks.push_back(std::move(t));
  }
  {
    TaskSpec t;
    t.task_id = "humour_rating";
    t.display_name = "HumourRating";
    t.category = Category::humor;
    t.role = Role::seen;
    t.label_set = {"low humor", "high humor"};
    t.instruction_text = R"tpl(Upon receiving a piece of text, your task is to assess its comedic quality and categorize it as either 'low humor' or 'high humor'.)tpl";
    t.input_template = "{text}";
    t.reframing = ThresholdRule{3.0, "high humor", "low humor", "low humor"};
    t.expected_splits = {{Split::train, 4932}, {Split::validation, 632}, {Split::test, 615}};
    tasks.push_back(std::move(t));
  }
  {
    TaskSpec t;
    t.task_id = "politeness_hayati";
    t.display_name = "PolitenessHayati";
    t.category = Category::other_social;
    t.role = Role::seen;
    t.label_set = {"impolite", "polite"};
    t.instruction_text = R"tpl(Upon receiving a piece of text, your task is to analyze and determine whether the language used within it is courteous and respectful, indicating politeness, or if it contains disrespectful or rude elements, indicating impoliteness. Your options for classification are confined to 'impolite' or 'polite'.)tpl";
    t.input_template = "{text}";
    t.expected_splits = {{Split::train, 256}, {Split::validation, 32}, {Split::test, 32}};
    tasks.push_back(std::move(t));
  }
  {
    TaskSpec t;
    t.task_id = "intimacy";
    t.display_name = "Intimacy";
    t.category = Category::other_social;
    t.role = Role::seen;
    t.label_set = {"very intimate", "intimate", "somewhat intimate", "not very intimate", "not intimate", "not intimate at all"};
    t.instruction_text = R"tpl(Assess the degree of intimacy expressed in the input text, taking into account the social context within the text. Your options for classification are confined to 'very intimate', 'intimate', 'somewhat intimate', 'not very intimate', 'not intimate' or 'not intimate at all'.)tpl";
    t.input_template = "{text}";
    t.expected_splits = {{Split::train, 1797}, {Split::validation, 225}, {Split::test, 225}};
    tasks.push_back(std::move(t));
  }
  {
    TaskSpec t;
    t.task_id = "subjective_bias";
    t.display_name = "SubjectiveBias";
    t.category = Category::trustworthiness;
    t.role = Role::seen;
    t.label_set = {"first sentence", "second sentence"};
    t.instruction_text = R"tpl(Given two pieces of text, your objective is to detect subjective bias, which manifests when language that should remain neutral and impartial is influenced by feelings, opinions, or personal preferences, whether intentionally or unintentionally. If you find bias in the first sentence, indicate 'first sentence' as the output; otherwise, specify 'second sentence'.)tpl";
    t.input_template = "{a} [SEP] {b}";
    t.expected_splits = {{Split::train, 8000}, {Split::validation, 9379}, {Split::test, 9379}};
    t.cap = 8000;
    tasks.push_back(std::move(t));
  }
  {
    TaskSpec t;
    t.task_id = "offensive";
    t.display_name = "Offensive";
    t.category = Category::offensiveness;
    t.role = Role::seen;
    t.label_set = {"offensive", "not offensive"};
    t.instruction_text = R"tpl(Evaluate the given text for any offensive content, which includes rudeness, disrespect, or toxicity. This assessment should consider if the text could potentially offend anyone, based on previous studies indicating a higher recall rate. Identify any disrespectful, inappropriate, or harmful language, phrases, or sentiments. If these elements exist, label the text as 'offensive'. If these elements are absent, mark the text as 'not offensive'.)tpl";
    t.input_template = "{text}";
    t.expected_splits = {{Split::train, 8000}, {Split::validation, 4666}, {Split::test, 4691}};
    t.cap = 8000;
    tasks.push_back(std::move(t));
  }
  {
    TaskSpec t;
    t.task_id = "sexist";
    t.display_name = "Sexist";
    t.category = Category::offensiveness;
    t.role = Role::seen;
    t.label_set = {"sexism", "not sexism"};
    t.instruction_text = R"tpl(Analyze the provided sentence and evaluate if it contains any elements that could be considered as gender-based discrimination. You are required to categorize the sentence into one of two classifications: 'sexism' if it exhibits gender discrimination, or 'not sexism' if it does not.)tpl";
    t.input_template = "{text}";
    t.expected_splits = {{Split::train, 7999}, {Split::validation, 4666}, {Split::test, 4691}};
    t.cap = 8000;
    tasks.push_back(std::move(t));
  }
  {
    TaskSpec t;
    t.task_id = "intent_to_offend";
    t.display_name = "IntentToOffend";
    t.category = Category::offensiveness;
    t.role = Role::seen;
    t.label_set = {"intentional", "not intentional"};
    t.instruction_text = R"tpl(Your task is to analyze the given text and identify if it intentionally promotes social biases and stereotypes. If you perceive that the author's motive was to deliberately offend, categorize the text as 'intentional'. If there's no apparent intent to offend, classify it as 'not intentional'. Remember, the focus is on the author's intent to offend, not just the offensiveness of the content.)tpl";
    t.input_template = "{text}";
    t.expected_splits = {{Split::train, 7999}, {Split::validation, 4666}, {Split::test, 4691}};
    t.cap = 8000;
    tasks.push_back(std::move(t));
  }
  {
    TaskSpec t;
    t.task_id = "biased_implication";
    t.display_name = "BiasedImplication";
    t.category = Category::offensiveness;
    t.role = Role::seen;
    t.label_set = {"biased", "not biased"};
    t.instruction_text = R"tpl(Your task is to scrutinize a given text and identify any signs of prejudice. You need to differentiate between statements that merely insult an individual and those that imply group discrimination, such as comparing 'F*ck you' (an individual insult) with 'F*ck you, f*ggot' (a group implication). Based on your analysis, categorize the text as either 'biased' or 'not biased'.)tpl";
    t.input_template = "{text}";
    t.expected_splits = {{Split::train, 7999}, {Split::validation, 4666}, {Split::test, 4691}};
    t.cap = 8000;
    tasks.push_back(std::move(t));
  }
  {
    TaskSpec t;
    t.task_id = "hate_speech";
    t.display_name = "HateSpeech";
    t.category = Category::related;
    t.role = Role::related;
    t.label_set = {"hate speech", "not hate speech"};
    t.instruction_text = R"tpl(Analyze the given text for hateful contents against women or immigrants. Your options for classification are confined to 'hate speech' or 'not hate speech'.)tpl";
    t.input_template = "{text}";
    t.expected_splits = {{Split::test, 2970}};
    tasks.push_back(std::move(t));
  }
  {
    TaskSpec t;
    t.task_id = "irony";
    t.display_name = "Irony";
    t.category = Category::related;
    t.role = Role::related;
    t.label_set = {"ironic", "not ironic"};
    t.instruction_text = R"tpl(Classify the input sentence as ironic or not ironic. Here ironic can be defined as the use of words or situations to convey a meaning that is opposite to what is expected. Your options for classification are confined to 'ironic' or 'not ironic'.)tpl";
    t.input_template = "{text}";
    t.expected_splits = {{Split::test, 784}};
    tasks.push_back(std::move(t));
  }
  {
    TaskSpec t;
    t.task_id = "politeness_stanford";
    t.display_name = "PolitenessStanford";
    t.category = Category::related;
    t.role = Role::related;
    t.label_set = {"impolite", "polite"};
    t.instruction_text = R"tpl(Analyze the provided text, considering its tone and language, and categorize it as either polite or impolite. Your options for classification are confined to 'impolite' or 'polite'.)tpl";
    t.input_template = "{text}";
    t.expected_splits = {{Split::test, 567}};
    tasks.push_back(std::move(t));
  }
  {
    TaskSpec t;
    t.task_id = "optimism";
    t.display_name = "Optimism";
    t.category = Category::related;
    t.role = Role::related;
    t.label_set = {"optimistic", "pessimistic", "neutral"};
    t.instruction_text = R"tpl(Analyze the sentiment of the provided text and classify it as 'optimistic', 'pessimistic' or 'neutral'.)tpl";
    t.input_template = "{text}";
    t.expected_splits = {{Split::test, 1495}};
    tasks.push_back(std::move(t));
  }
  {
    TaskSpec t;
    t.task_id = "complaints";
    t.display_name = "Complaints";
    t.category = Category::related;
    t.role = Role::related;
    t.label_set = {"complaint", "not complaint"};
    t.instruction_text = R"tpl(Given an input text, identify if it contains a complaint or not. Complaining is a basic speech act used to express a negative mismatch between reality and expectations towards a state of affairs, product, organization or event. Your options for classification are confined to 'complaint' or 'not complaint'.)tpl";
    t.input_template = "{text}";
    t.expected_splits = {{Split::test, 345}};
    tasks.push_back(std::move(t));
  }
  {
    TaskSpec t;
    t.task_id = "agree_disagree";
    t.display_name = "AgreeDisagree";
    t.category = Category::related;
    t.role = Role::related;
    t.label_set = {"agree", "disagree", "N/A"};
    t.instruction_text = R"tpl(You are provided with two pieces of text and your task is to analyze and categorize these texts based on their argumentative stance. Determine whether both texts are arguing in favor of the same viewpoint, if they are opposing each other or if they are talking about two different topics. Your options for classification are confined to 'agree', 'disagree' or 'N/A'.)tpl";
    t.input_template = "{a} [SEP] {b}";
    t.expected_splits = {{Split::test, 4760}};
    t.label_aliases["N/A"] = {"na", "n a", "neither"};
    tasks.push_back(std::move(t));
  }
  return tasks;
}

}  // namespace socinstruct::detail
