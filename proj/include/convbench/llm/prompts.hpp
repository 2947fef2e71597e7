#pragma once

// Prompt bodies for every LLM call the workbench makes. Placeholders are
// `{identifier}`; everything else is literal text sent to the provider.

#include <string>
#include <vector>

#include "convbench/llm/schema.hpp"

namespace convbench::llm {

enum class PromptGroup { pipeline, audit, auxiliary };

struct PromptSpec {
    std::string id;
    PromptGroup group;
    std::string body;
    Schema schema;
};

namespace prompt_ids {
inline constexpr const char* alignment = "alignment_validation";
inline constexpr const char* aspects = "aspect_extraction";
inline constexpr const char* facts = "fact_verification";
inline constexpr const char* overlap = "aspect_overlap";
inline constexpr const char* ordering = "aspect_ordering";
inline constexpr const char* subquestion = "subquestion_generation";
inline constexpr const char* scoring = "document_scoring";
inline constexpr const char* turn1 = "turn1_query";
inline constexpr const char* followup = "followup_query";
inline constexpr const char* answer = "grounded_answer";
inline constexpr const char* diversity = "turn_diversity";
inline constexpr const char* suitability = "aspect_suitability";

inline constexpr const char* naturalness = "audit_naturalness";
inline constexpr const char* coherence = "audit_turn_coherence";
inline constexpr const char* question_quality = "audit_question_quality";
inline constexpr const char* groundedness = "audit_groundedness";
inline constexpr const char* dependency = "audit_dependency";
inline constexpr const char* pattern = "audit_question_pattern";

inline constexpr const char* retrieval_reasoning = "retrieval_reasoning_annotation";
inline constexpr const char* negative_queries = "hard_negative_queries";
inline constexpr const char* query_rewrite = "query_rewrite";
inline constexpr const char* search_rationale = "search_rationale";
inline constexpr const char* judge = "answer_judge";
inline constexpr const char* generation = "answer_generation";
}  // namespace prompt_ids

inline const std::vector<std::string>& aspect_types() {
    static const std::vector<std::string> v{"detail",    "step",    "implication", "distinction", "definition",
                                            "mechanism", "example", "comparison",  "history",     "application"};
    return v;
}

inline const std::vector<std::string>& dependency_types() {
    static const std::vector<std::string> v{"coreference",  "ellipsis",    "substitution",
                                            "continuation", "topic_shift", "self_contained"};
    return v;
}

inline const std::vector<std::string>& question_patterns() {
    static const std::vector<std::string> v{"why",     "how",         "what",    "compare", "what_if",
                                            "confirm", "more_detail", "example", "effect"};
    return v;
}

namespace detail {

inline Field field(std::string n, Kind kind, bool required = true) {
    Field f;
    f.name = std::move(n);
    f.kind = kind;
    f.required = required;
    return f;
}
inline Field str(std::string n, bool required = true) { return field(std::move(n), Kind::string, required); }
inline Field num(std::string n, bool required = true) { return field(std::move(n), Kind::number, required); }
inline Field integer(std::string n, bool required = true) { return field(std::move(n), Kind::integer, required); }
inline Field boolean(std::string n, bool required = true) { return field(std::move(n), Kind::boolean, required); }
inline Field str_list(std::string n, bool required = true) {
    auto f = field(std::move(n), Kind::array, required);
    f.element_kind = Kind::string;
    return f;
}
inline Field one_of(std::string n, std::vector<std::string> values) {
    auto f = field(std::move(n), Kind::string);
    f.one_of = std::move(values);
    return f;
}
inline Field object_list(std::string n, std::vector<Field> fields) {
    auto f = field(std::move(n), Kind::array);
    f.element_kind = Kind::object;
    f.element_fields = std::move(fields);
    return f;
}
inline Field nullable_str(std::string n) {
    auto f = field(std::move(n), Kind::string);
    f.nullable = true;
    return f;
}

inline std::vector<PromptSpec> build_prompts() {
    std::vector<PromptSpec> out;

    out.push_back({prompt_ids::alignment, PromptGroup::pipeline, R"PROMPT(You are evaluating whether documents can support an answer.

GOLD ANSWER:
{gold_answer}

DOCUMENTS:
{documents}

IMPORTANT:
- Documents don't need ALL details
- Core facts are enough
- Related information counts as support

TASK:
1. Identify KEY CLAIMS (focus on main ideas, not minor details, max 3-5 claims)
2. Check if documents contain supporting information
3. Return coverage percentage

Return JSON:
{
  "key_claims": ["main claim 1", "main claim 2", ...],
  "supported_claims": ["claim1", ...],
  "unsupported_claims": ["claim2", ...],
  "coverage_percentage": 0.0-1.0,
  "is_sufficient": boolean
})PROMPT",
                   Schema{{str_list("key_claims"), str_list("supported_claims"), str_list("unsupported_claims"),
                           num("coverage_percentage"), boolean("is_sufficient")}}});

    out.push_back({prompt_ids::aspects, PromptGroup::pipeline, R"PROMPT(Extract {num_aspects} distinct, GRANULAR aspects from the gold answer.

QUERY: {query}

REASONING (why this answer is relevant):
{reasoning}

GOLD ANSWER:
{gold_answer}

ALREADY EXTRACTED ASPECTS (do NOT duplicate these):
{existing_aspects}

WHAT IS A GRANULAR ASPECT?
An aspect does NOT need to be a broad topic. It can be a specific detail, a single step in a process, or a distinct implication.
- Broad (AVOID): "How Photosynthesis Works" (Too big, covers everything)
- Granular (GOOD): "Role of Chlorophyll in Light Absorption"
- Granular (GOOD): "The Calvin Cycle's Carbon Fixation Step"

ASPECT REQUIREMENTS:
1. SPECIFICITY: Drill down into details. A single sentence with a verified fact can be an aspect.
2. VERBATIM EXCERPT: Copy exact text from gold answer.
3. SUBSTANTIVE: Must contain facts, mechanisms, or examples.
4. DISTINCT ANGLE: If a topic is already covered, look for a specific implication, limitation, or counter-example.

ASPECT TYPES:
"detail" | "step" | "implication" | "distinction" | "definition" | "mechanism" | "example" | "comparison" | "history" | "application"

Return JSON:
{
  "aspects": [
    {
      "aspect_name": "Specific Name (3-6 words)",
      "aspect_type": "detail|step|implication|...",
      "excerpt": "Exact verbatim text from gold answer",
      "distinct_from_existing": "How this differs from existing aspects"
    }
  ],
  "extraction_notes": "Notes on finding distinct details"
})PROMPT",
                   Schema{{object_list("aspects", {str("aspect_name"), str("aspect_type"), str("excerpt"),
                                                   str("distinct_from_existing", false)}),
                           str("extraction_notes", false)}}});

    out.push_back({prompt_ids::facts, PromptGroup::pipeline, R"PROMPT(Extract key facts from the EXCERPT, then verify each against the DOCUMENTS.

ASPECT EXCERPT:
{aspect_excerpt}

DOCUMENTS:
{documents}

TASK:
1. Extract 1 to 5 key facts from the excerpt (depending on length).
   - If the excerpt is a single detail, extract just 1 fact.
   - Do NOT invent facts to fill a quota.
2. For each fact, check if it's supported by the documents.
3. Return ONLY facts that are supported.

A fact is "supported" if:
- Explicitly stated in documents, OR
- Clearly implied by combining document information.

Return JSON:
{
  "extracted_facts": [
    {
      "fact": "the extracted fact (5-15 words)",
      "is_supported": boolean,
      "supporting_doc_id": "doc_X" or null,
      "reason": "brief reason"
    }
  ],
  "supported_facts": ["fact1", "fact2", ...],
  "unsupported_facts": ["fact3", ...],
  "summary": {"total_extracted": integer, "supported_count": integer}
})PROMPT",
                   Schema{{object_list("extracted_facts", {str("fact"), boolean("is_supported"),
                                                           nullable_str("supporting_doc_id"), str("reason", false)}),
                           str_list("supported_facts", false), str_list("unsupported_facts", false)}}});

    out.push_back({prompt_ids::overlap, PromptGroup::pipeline, R"PROMPT(Does the NEW ASPECT cover content already covered by EXISTING ASPECTS?

NEW ASPECT: {aspect_name} ({aspect_type})
CONTENT: {excerpt}

EXISTING ASPECTS:
{existing_aspects_text}

WHAT COUNTS AS OVERLAP?
Two aspects OVERLAP if they:
- Make the EXACT SAME factual claims.
- Explain the EXACT SAME step of a process.
- Are merely rephrasing the same information.

WHAT IS NOT OVERLAP? (DISTINCT CONTENT):
- Different steps of the same mechanism (e.g., "Step 1: Input" vs "Step 2: Processing")
- Different examples of the same concept
- Specific details vs General definitions
- Implications vs Mechanisms
- "What it is" vs "How it works" vs "Why it matters"

DECISION: Does the new aspect contain specific details, steps, or implications NOT in the existing aspects?

Return JSON:
{
  "has_overlap": boolean,
  "overlaps_with": "name of overlapping aspect" or null,
  "overlap_type": "same_claims" | "same_examples" | "same_step" | "no_overlap",
  "reasoning": "one sentence explanation"
})PROMPT",
                   Schema{{boolean("has_overlap"), nullable_str("overlaps_with"),
                           one_of("overlap_type", {"same_claims", "same_examples", "same_step", "no_overlap"}),
                           str("reasoning", false)}}});

    out.push_back({prompt_ids::ordering, PromptGroup::pipeline, R"PROMPT(Order these topic aspects for natural conversation progression.

CONVERSATION STRATEGY: {conversation_strategy}

ASPECTS (format: [type] name):
{aspect_summaries}

ORDERING PRINCIPLES:
1. Foundational/definitional aspects first (what something IS)
2. Then mechanisms/processes (how it WORKS)
3. Then historical context or causes (WHY/WHEN)
4. Then specific examples/cases (INSTANCES)
5. End with implications/modern relevance (SO WHAT)

EXAMPLE GOOD ORDER:
1. [factual] "Definition of nation vs state" → first (foundational)
2. [explanatory] "Distinction between political/cultural" → second
3. [historical] "Colonial impact on borders" → third
4. [factual] "Stateless nations examples" → fourth
5. [explanatory] "Modern nation-state challenges" → last (implications)

Return JSON:
{
  "ordered_indices": [0, 2, 1, 3],
  "reasoning": "Brief explanation of ordering logic"
})PROMPT",
                   Schema{{Field{"ordered_indices", Kind::array, true, false, {}, Kind::integer, {}},
                           str("reasoning", false)}}});

    out.push_back({prompt_ids::subquestion, PromptGroup::pipeline, R"PROMPT(Generate a focused sub-question for this aspect.

QUERY: {query}

OVERALL REASONING: {overall_reasoning}

ASPECT: {aspect_name}
TYPE: {aspect_type}

KEY FACTS:
{semantic_facts}

PREVIOUS SUB-QUESTIONS:
{previous_subquestions}

Generate a sub-question that:
1. Aligns with the overall reasoning and query intent
2. Specifically targets this aspect
3. Is distinct from previous sub-questions
4. Can be answered using the facts listed

Return JSON:
{
  "sub_question": "The focused sub-question?",
  "confidence": 0.0-1.0,
  "reasoning": "Why this targets this aspect AND aligns with overall reasoning"
})PROMPT",
                   Schema{{str("sub_question"), num("confidence"), str("reasoning", false)}}});

    out.push_back({prompt_ids::scoring, PromptGroup::pipeline, R"PROMPT(Score how well each document helps answer the sub-question.

SUB-QUESTION: {sub_question}

RETRIEVAL REASONING: {retrieval_reasoning}

KEY FACTS TO COVER:
{semantic_facts}

CANDIDATE DOCUMENTS:
{candidate_docs}

SCORING CRITERIA (each 0-10):
- support_score: How well does the document support answering the sub-question?
- completeness_score: Does the document cover the key facts listed above?
- clarity_score: Is the information clearly presented and easy to extract?
- misleading_score: Does the document contain potentially misleading information? (PENALTY)

Final score formula:
score = 0.5 × S_s + 0.3 × S_c + 0.15 × S_l − 0.05 × S_m

Return JSON:
{
  "document_scores": [
    {
      "doc_id": "doc_0",
      "support_score": 8,
      "completeness_score": 7,
      "clarity_score": 9,
      "misleading_score": 0,
      "final_score": 7.85,
      "reasoning": "Brief justification"
    }
  ]
})PROMPT",
                   Schema{{object_list("document_scores",
                                       {str("doc_id"), num("support_score"), num("completeness_score"),
                                        num("clarity_score"), num("misleading_score"), num("final_score", false),
                                        str("reasoning", false)})}}});

    out.push_back({prompt_ids::turn1, PromptGroup::pipeline, R"PROMPT(Transform the technical sub-question into a natural opening query for a conversation.

ORIGINAL QUERY TOPIC: {original_query}

TECHNICAL SUB-QUESTION: {sub_question}

REQUIREMENTS:
1. This is Turn 1—there is NO conversation history yet.
2. The question must stand alone and introduce the topic naturally.
3. Keep the same technical content but make it sound like a curious person asking.
4. Briefly mention the topic area so the question has context.

GOOD EXAMPLES:
- Technical: "What is the mechanism of phototaxis in insects?"
- Natural: "I've noticed bugs always fly toward lights at night. What's actually pulling them there?"
- Technical: "How does the nasal cycle regulate airflow?"
- Natural: "In smell perception, are there basic smells that combine like RGB colors?"

Return JSON:
{
  "conversational_query": "The natural opening question WITH topic intro",
  "kept_technical_content": true/false,
  "natural_language_used": true/false
})PROMPT",
                   Schema{{str("conversational_query"), boolean("kept_technical_content", false),
                           boolean("natural_language_used", false)}}});

    out.push_back({prompt_ids::followup, PromptGroup::pipeline, R"PROMPT(Transform this into a natural follow-up question.

TOPIC: {original_query}

RECENT CONVERSATION:
{history}

TECHNICAL QUESTION TO ASK: {sub_question}

PREVIOUS OPENERS USED: {previous_starters}

CORE REQUIREMENTS:
1. Keep the SAME content/intent as the technical question
2. Sound like a real curious person, not a student or interviewer
3. VARY your opener—never repeat a starting word/phrase from "previous openers"
4. VARY your structure—don't use the same question pattern as recent turns

NATURAL CONVERSATION PATTERNS:
- Direct: "What makes...", "How does...", "Why do..."
- Curious: "I wonder if...", "What about...", "How come..."
- Confirming: "Does that mean...", "Is that why...", "Would that..."
- Probing: "But what if...", "Even when...", "What happens if..."
- Connecting: "And does that...", "Then how...", "Which would mean..."

LANGUAGE RULES:
- Use simple, everyday words; keep under 20 words
- Use pronouns (it, that, this, they) to connect to previous content
- Use contractions naturally (don't, isn't, wouldn't)
- Do NOT use academic language or filler transitions

Return JSON:
{
  "conversational_query": "The natural follow-up question",
  "transition_type": "A/B/C/D/E",
  "uses_natural_language": true/false,
  "references_previous_content": true/false
})PROMPT",
                   Schema{{str("conversational_query"), str("transition_type", false),
                           boolean("uses_natural_language", false), boolean("references_previous_content", false)}}});

    out.push_back({prompt_ids::answer, PromptGroup::pipeline, R"PROMPT(Answer this question naturally using the information provided.

CONVERSATION SO FAR:
{history}

CURRENT QUESTION:
{query}

AVAILABLE INFORMATION:
{documents}

HOW TO ANSWER:
1. Use ONLY information from the provided text above
2. Speak naturally—explain as if talking to a curious friend
3. Build on what was discussed earlier in the conversation
4. Focus on WHAT YOU CAN EXPLAIN, not what you can't
5. If the full answer isn't available, explain what IS known about the topic
6. Keep answer conversational: 2-4 sentences, clear and direct

IMPORTANT RULES:
✓ State facts directly and naturally
✓ Connect to previous conversation smoothly
✓ Explain using everyday language
✗ Do NOT mention "documents", "sources", "the text"
✗ Do NOT end with "However, [gaps in information]"
✗ Do NOT add invented examples, names, or details

Return JSON:
{
  "answer": "Your natural, conversational answer",
  "uses_natural_language": true/false,
  "avoids_meta_references": true/false,
  "focuses_on_available_info": true/false
})PROMPT",
                   Schema{{str("answer"), boolean("uses_natural_language", false),
                           boolean("avoids_meta_references", false), boolean("focuses_on_available_info", false)}}});

    out.push_back({prompt_ids::diversity, PromptGroup::pipeline, R"PROMPT(Does this new answer add value to the conversation?

RECENT CONVERSATION:
{previous_content}

NEW ANSWER:
{new_answer}

EVALUATION CRITERIA:

✓ ACCEPT if answer does ANY of these:
1. Introduces NEW factual information not previously stated
2. Drills deeper into a specific detail (e.g., mechanism → sub-mechanism)
3. Provides a concrete example of something described generally before
4. Explains a consequence/implication not yet discussed
5. Answers a different aspect of the same topic

✗ REJECT only if answer does BOTH:
1. Contains the SAME factual claims as previous turns (not just same topic)
2. Uses similar phrasing/wording to express those facts

IMPORTANT DISTINCTIONS:
- Same TOPIC but different ANGLE = ACCEPT
- Same FACTS with different WORDS = REJECT
- General → Specific = ACCEPT

Return JSON:
{
  "adds_value": boolean,
  "value_type": "new_facts" | "deepening" | "example" | "implication" | "different_angle" | "repetitive",
  "reason": "brief explanation"
})PROMPT",
                   Schema{{boolean("adds_value"),
                           one_of("value_type", {"new_facts", "deepening", "example", "implication",
                                                 "different_angle", "repetitive"}),
                           str("reason", false)}}});

    out.push_back({prompt_ids::suitability, PromptGroup::pipeline, R"PROMPT(Should this aspect become a conversation sub-question?

ASPECT: {aspect_name}
TYPE: {aspect_type}
EXCERPT: {excerpt}

CLASSIFICATION RULES:
1. "substantive" → YES: Contains facts, mechanisms, explanations, examples, or concrete information.
   - NOTE: Short excerpts ARE ACCEPTABLE if they contain a clear fact.
2. "meta" → NO: Contains disclaimers, advice to "consult professional", caveats, or meta-commentary.
3. "insufficient" → NO: Content is meaningless or purely structural (e.g., "Here is a list:").

Return JSON:
{
  "should_generate": boolean,
  "reason": "explanation",
  "aspect_category": "substantive" | "meta" | "insufficient"
})PROMPT",
                   Schema{{boolean("should_generate"), str("reason", false),
                           one_of("aspect_category", {"substantive", "meta", "insufficient"})}}});

    // Conversation-quality audit prompts.

    out.push_back({prompt_ids::naturalness, PromptGroup::audit, R"PROMPT(Evaluate whether this conversation sounds like NATURAL HUMAN SPEECH.

CONVERSATION:
{conversation}

TASK: Rate how natural and human-like the language is (not robotic or overly formal).

CHECK ONLY these language features:

1. CASUAL WORD CHOICES:
- Contractions used: "don't", "isn't", "what's" (vs formal "do not", "is not")
- Casual words: "got", "stuff", "things", "pretty much" (vs formal "obtained", "materials")
- Softening words: "kind of", "sort of", "maybe", "I think"

2. CONVERSATION STARTERS:
- Natural openers: "So", "Well", "Oh", "Yeah", "I mean", "Actually"
- Response words: "Right", "Okay", "I see", "Got it"

3. SENTENCE STYLE:
- Natural incomplete sentences (OK in speech)
- Casual question phrasing (not stiff templates)

DO NOT CHECK (other prompts handle these):
- Whether turns connect logically
- Whether questions cover the topic well
- Whether answers are factually correct

SCORING:
5 - Sounds completely natural, like real human speech
4 - Mostly natural, few formal spots
3 - Mix of natural and formal/stiff language
2 - Mostly formal or robotic sounding
1 - Entirely artificial, would never occur in real speech

Return JSON:
{
  "score": <1-5>,
  "natural_phrases": ["quote 2-3 natural-sounding phrases found"],
  "unnatural_phrases": ["quote any stiff or robotic phrases found"],
  "justification": "1-2 sentences explaining your score"
})PROMPT",
                   Schema{{integer("score"), str_list("natural_phrases", false), str_list("unnatural_phrases", false),
                           str("justification", false)}}});

    out.push_back({prompt_ids::coherence, PromptGroup::audit, R"PROMPT(Evaluate whether conversation turns CONNECT LOGICALLY to each other.

CONVERSATION:
{conversation}

TASK: Rate how well each question follows from the previous answer.

CHECK ONLY these connection features:

1. CLEAR REFERENCES:
- When "it", "this", "that", "they" are used, is it clear what they refer to?
- When "the problem" or "the process" is mentioned, was it introduced earlier?

2. LOGICAL CONNECTIONS (how does each question relate to the previous answer?):
- ASKS FOR DETAILS: Question wants more information about something just mentioned
- ASKS TO CLARIFY: Question wants to understand something from the answer better
- ASKS ABOUT EFFECTS: Question asks what happens as a result of what was described
- ASKS FOR CONTRAST: Question asks about an alternative or opposite view
- NARROWS FOCUS: Question zooms in on one specific part mentioned

3. NO GAPS:
- Each question should make sense given what came before
- No sudden jumps to unrelated topics without transition

DO NOT CHECK (other prompts handle these):
- Whether language sounds natural
- Whether questions are about different topics
- Whether answers are factually correct

SCORING:
5 - Every question clearly connects to the previous answer
4 - Most questions connect well, 1-2 slightly unclear links
3 - Some questions connect, but several feel disconnected
2 - Many questions don't clearly follow from previous answers
1 - Questions seem random, no logical flow

Return JSON:
{
  "score": <1-5>,
  "good_connections": ["describe 1-2 turns that connect well"],
  "weak_connections": ["describe any turns that don't connect clearly"],
  "unclear_references": ["list any 'it/this/that' without clear meaning"],
  "justification": "1-2 sentences explaining your score"
})PROMPT",
                   Schema{{integer("score"), str_list("good_connections", false), str_list("weak_connections", false),
                           str_list("unclear_references", false), str("justification", false)}}});

    out.push_back({prompt_ids::question_quality, PromptGroup::audit, R"PROMPT(Evaluate whether the questions COVER DIFFERENT USEFUL ASPECTS of the topic.

ORIGINAL TOPIC:
{original_query}

QUESTIONS:
{questions}

TASK: Rate whether the questions explore the topic well without repeating.

CHECK ONLY these coverage features:

1. DIFFERENT ASPECTS:
- Does each question ask about something DIFFERENT?
- Are any two questions basically asking the same thing in different words?

2. USEFUL QUESTIONS:
- Are questions specific enough to get clear answers?
- Do questions go beyond obvious or trivial information?
- Bad examples: "What is X?" (too basic), "Tell me about X" (too vague)

3. GOOD COVERAGE:
- Together, do the questions explore important parts of the topic?
- Are there major aspects of the topic that are missed?

DO NOT CHECK (other prompts handle these):
- Whether questions sound natural
- Whether questions follow logically from answers
- Whether the answers are correct

SCORING:
5 - All questions distinct, specific, and together cover the topic well
4 - Most questions distinct and useful, maybe 1 similar pair
3 - Some overlap between questions, some too vague, partial coverage
2 - Several questions overlap or are too vague/trivial
1 - Heavy repetition, mostly vague or useless questions

Return JSON:
{
  "score": <1-5>,
  "aspects_covered": ["list the different aspects/subtopics the questions address"],
  "repeated_questions": ["list any question pairs that ask about the same thing"],
  "weak_questions": ["list any questions that are too vague or trivial"],
  "justification": "1-2 sentences explaining your score"
})PROMPT",
                   Schema{{integer("score"), str_list("aspects_covered", false), str_list("repeated_questions", false),
                           str_list("weak_questions", false), str("justification", false)}}});

    out.push_back({prompt_ids::groundedness, PromptGroup::audit, R"PROMPT(Evaluate whether the answers are SUPPORTED BY THE DOCUMENTS.

SOURCE DOCUMENTS:
{documents}

ANSWERS TO CHECK:
{answers}

TASK: Rate whether the answer content can be found in or reasonably inferred from the documents.

CHECK ONLY these accuracy features:

1. CLAIMS MATCH DOCUMENTS:
- Can each fact in the answers be found in the source documents?
- Are the facts stated correctly (not twisted or misrepresented)?

2. NOTHING MADE UP:
- Are there any invented names, places, or organizations?
- Are there any made-up numbers, dates, or statistics?
- Are there any fake technical terms?

3. NO CONTRADICTIONS:
- Do any claims directly contradict what the documents say?
- Are there claims that go way beyond what the documents support?

ACCEPTABLE:
- Rewording information from documents
- Drawing obvious conclusions from stated facts

NOT ACCEPTABLE:
- Adding facts not found in documents
- Stating guesses as if they were facts

DO NOT CHECK (other prompts handle these):
- Whether answers sound natural
- Whether answers connect to each other
- Whether the questions were good

SCORING:
5 - All claims supported by documents, nothing made up
4 - Nearly all claims supported (95%+), only minor inferences
3 - Most claims supported (80-95%), some unsupported but plausible
2 - Many claims unsupported (50-80%), some things made up
1 - Mostly unsupported (<50%), major fabrications

Return JSON:
{
  "score": <1-5>,
  "supported_claims": ["list 2-3 claims that ARE in the documents"],
  "unsupported_claims": ["list claims NOT found in documents"],
  "made_up_content": ["list any invented facts, names, or numbers"],
  "justification": "1-2 sentences explaining your score"
})PROMPT",
                   Schema{{integer("score"), str_list("supported_claims", false), str_list("unsupported_claims", false),
                           str_list("made_up_content", false), str("justification", false)}}});

    out.push_back({prompt_ids::dependency, PromptGroup::audit, R"PROMPT(Classify how this question DEPENDS on the previous conversation.

PREVIOUS CONVERSATION:
{prior_context}

CURRENT QUESTION:
{current_question}

TASK: Pick ONE dependency type that best describes how this question relates to what came before.

DEPENDENCY TYPES (pick ONE):

1. "coreference" - Uses pronouns pointing back to something mentioned before
- Look for: it, this, that, they, these, those
- Example: "Does IT also affect..." / "What about THAT?"

2. "ellipsis" - Incomplete sentence that needs context to understand
- Look for: Missing words, fragments like "And...?", "How about...?"
- Example: "And the second reason?" / "What about in winter?"

3. "substitution" - Uses a general term for something specific mentioned before
- Look for: "this process", "that method", "the problem", "such cases"
- Example: After "photosynthesis" → "How efficient is this process?"

4. "continuation" - Complete question on the same topic, but no explicit links
- Look for: Full sentence, related topic, no pronouns pointing back
- Example: After photosynthesis → "What role does chlorophyll play?"

5. "topic_shift" - Moves to a new aspect or subtopic
- Look for: "What about...", "Regarding...", "Moving to...", new direction
- Example: After science → "What are the economic effects?"

6. "self_contained" - Fully independent, makes sense alone (usually Turn 1)
- Look for: Could be understood without any prior context
- Example: First question of the conversation

Return JSON:
{
  "dependency_type": "one of the 6 types above",
  "evidence": "quote the specific words that show this type",
  "explanation": "one sentence explaining your choice"
})PROMPT",
                   Schema{{one_of("dependency_type", dependency_types()), str("evidence", false),
                           str("explanation", false)}}});

    out.push_back({prompt_ids::pattern, PromptGroup::audit, R"PROMPT(Classify what TYPE of answer this question is looking for.

QUESTION:
{question}

TASK: Pick ONE pattern that best describes what kind of information this question wants.

QUESTION TYPES (pick ONE):

1. "why" - Asks for REASONS or CAUSES
- Look for: "Why...?", "What causes...?", "What leads to...?"
- Wants: Explanations, reasons

2. "how" - Asks HOW something WORKS or HAPPENS
- Look for: "How does...?", "What is the process...?", "What happens...?"
- Wants: Steps, process descriptions

3. "what" - Asks for FACTS (definitions, names, dates, places)
- Look for: "What is...?", "Who...?", "When...?", "Where...?"
- Wants: Specific facts, definitions

4. "compare" - Asks about DIFFERENCES or SIMILARITIES
- Look for: "How does X differ from Y?", "Is X similar to Y?", "Which is better?"
- Wants: Comparisons

5. "what_if" - Asks about POSSIBILITIES or HYPOTHETICALS
- Look for: "What would happen if...?", "Could X...?", "What if...?"
- Wants: Speculation, possibilities

6. "confirm" - Asks to VERIFY understanding
- Look for: "Is it true that...?", "Does that mean...?", "So...right?"
- Wants: Yes/no confirmation

7. "more_detail" - Asks for MORE INFORMATION on something
- Look for: "Can you explain more...?", "What specifically...?", "Tell me more..."
- Wants: Deeper explanation

8. "example" - Asks for EXAMPLES or INSTANCES
- Look for: "What are examples of...?", "Can you give an instance?", "Like what?"
- Wants: Concrete cases

9. "effect" - Asks about RESULTS or IMPLICATIONS
- Look for: "What does this mean for...?", "What are the effects...?", "What happens as a result?"
- Wants: Outcomes, impacts

Return JSON:
{
  "question_pattern": "one of the 9 types above",
  "evidence": "quote the specific words that show this type",
  "explanation": "one sentence explaining your choice"
})PROMPT",
                   Schema{{one_of("question_pattern", question_patterns()), str("evidence", false),
                           str("explanation", false)}}});

    // Auxiliary prompts. These steps have no published wording; the bodies
    // below are this project's own.

    out.push_back({prompt_ids::retrieval_reasoning, PromptGroup::auxiliary, R"PROMPT(Describe what a relevant document for this question must contain.

QUESTION: {sub_question}

SELECTED DOCUMENTS:
{documents}

TASK:
1. State the information TARGET a retriever should look for, in one short phrase.
2. List RELEVANCE SIGNALS: concepts, terms, or claims whose presence shows a document is useful.
3. List IRRELEVANCE SIGNALS: look-alike topics that share vocabulary but do not answer the question.

Return JSON:
{
  "target": "short description of the needed information",
  "relevance_signals": ["signal 1", "signal 2", ...],
  "irrelevance_signals": ["signal 1", ...]
})PROMPT",
                   Schema{{str("target"), str_list("relevance_signals"), str_list("irrelevance_signals")}}});

    out.push_back({prompt_ids::negative_queries, PromptGroup::auxiliary, R"PROMPT(Write {num_queries} web search queries that are topically related to the question below but focus on aspects that would NOT help answer it.

QUESTION: {query}

ANSWER (do not target this information):
{gold_answer}

Each query should share the question's domain vocabulary while pointing to a neighbouring, unhelpful subtopic.

Return JSON:
{
  "queries": ["query 1", "query 2", ...]
})PROMPT",
                   Schema{{str_list("queries")}}});

    out.push_back({prompt_ids::query_rewrite, PromptGroup::auxiliary, R"PROMPT(Rewrite the last question of this conversation so it can be understood without the conversation.

CONVERSATION:
{history}

LAST QUESTION: {query}

Resolve pronouns and omitted context. Keep the meaning unchanged and do not answer it.

Return JSON:
{
  "rewritten_query": "self-contained question"
})PROMPT",
                   Schema{{str("rewritten_query")}}});

    out.push_back({prompt_ids::search_rationale, PromptGroup::auxiliary, R"PROMPT(Explain what a search engine should look for to answer the current question.

CONVERSATION:
{history}

CURRENT QUESTION: {query}

Write a short search rationale: the underlying information need, the key concepts and technical terms a helpful passage would mention, and the reasoning that connects them to the question.

Return JSON:
{
  "rationale": "search rationale text"
})PROMPT",
                   Schema{{str("rationale")}}});

    out.push_back({prompt_ids::judge, PromptGroup::auxiliary, R"PROMPT(You are grading an answer in a multi-turn conversation. Score each dimension on a 1-5 scale (1 = very poor, 5 = excellent).

CONVERSATION SO FAR:
{history}

QUESTION:
{question}

PASSAGES GIVEN TO THE ANSWERER:
{passages}

REFERENCE ANSWER:
{reference_answer}

ANSWER TO GRADE:
{answer}

DIMENSIONS:
- correctness: Are the answer's claims factually accurate with respect to the reference answer?
- completeness: Does the answer cover the information the reference answer provides?
- relevance: Does the answer address the question that was asked?
- coherence: Is the answer clear, well organized, and consistent with the conversation?
- faithfulness: Is every claim grounded in the provided passages? {faithfulness_instruction}

Return JSON:
{
  "correctness": <1-5>,
  "completeness": <1-5>,
  "relevance": <1-5>,
  "coherence": <1-5>,
  "faithfulness": <1-5> or null,
  "justification": "1-2 sentences"
})PROMPT",
                   Schema{{integer("correctness"), integer("completeness"), integer("relevance"),
                           integer("coherence"), Field{"faithfulness", Kind::integer, false, true, {}, Kind::any, {}},
                           str("justification", false)}}});

    out.push_back({prompt_ids::generation, PromptGroup::auxiliary, R"PROMPT(Answer the user's latest question in this conversation.

CONVERSATION SO FAR:
{history}

QUESTION:
{question}

PASSAGES:
{passages}

Answer in 2-4 sentences. {grounding_instruction})PROMPT",
                   Schema{}});

    return out;
}

}  // namespace detail

}  // namespace convbench::llm
