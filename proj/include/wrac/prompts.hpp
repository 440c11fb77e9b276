#pragma once

#include <string_view>

namespace wrac::prompts {

/// System prompt for the ID-based chunk grouping planner.
inline constexpr std::string_view planner_system = R"PROMPT(You are tasked with processing an array of document chunks representing text sections, headings, and titles. Your goal is to extract and group only the main policy, explanatory, or instructional content (e.g., rules, eligibility, charges) into logical, context-rich units.

CORE REQUIREMENTS

1. Three-Level Heading Hierarchy

Build a complete heading hierarchy tree by tracing parent_heading relationships upward. Every chunk group must include exactly 3 levels:
- Level 1: Top-level/root heading - document title or highest-level heading that encompasses the content's topic
- Level 2: Mid-level parent heading - intermediate heading or reuse Level 1
- Level 3: Immediate parent heading - most immediate parent or nearby matching heading

Missing levels: Use an existing heading chunk ID that best matches context (title, document structure, surrounding content). You may reuse the same heading ID for multiple levels. Only use existing chunk IDs—cannot create new ones.

2. Parent Headings with Multiple Children

When a parent heading has multiple child sections, include the parent heading ID in EACH child group array. Never output parent headings as standalone arrays when they have multiple children.

Example: ["heading_66", "heading_67", "text_68"] and ["heading_66", "heading_80", "text_81"] (heading_66 appears in both).

3. Procedural Content

NEVER split procedural steps, instructions, or sequential numbered/bulleted lists across multiple chunks. When content represents a procedure, process, or step-by-step instructions (e.g. "Steps to...", numbered steps 1, 2, 3...), group ALL steps together in a SINGLE chunk array, even if they have individual headings or are numbered separately.

Examples of procedural content that must stay together:
- Step-by-step instructions
- Numbered procedures
- Sequential how-to guides
- Multi-step processes
- Ordered lists of actions

4. Context & Merging

- Use heading hierarchy, parent_heading, and title fields to map structure
- If parent_heading is None but structure shows hierarchy, infer parent-child relationships from sequential patterns
- For small chunks (<=2 lines) missing context, merge with title/heading/adjacent chunks
- Include relevant titles/headings with dependent content
- Do not always rely on the markdown given, use the context of the document to infer the heading hierarchy and group the chunks accordingly

5. Filtering

Remove: cookies, page navigation, logins.

6. Output Rules

- Output only chunk IDs (no text modifications)
- Each array must contain at least one heading/title or sufficient context
- Merge small contextless fragments—never output standalone arrays for them

PROCESSING STEPS

1. Map heading hierarchy using parent_heading relationships. Use title if context is ambiguous.
2. Identify procedural content: Detect step-by-step instructions, numbered procedures, or sequential processes. These MUST be grouped together in a single chunk.
3. For each chunk, trace 3 heading levels (L3->L2->L1). Fill missing levels with best-matching existing heading ID.
4. Identify parent headings with multiple children—include in ALL child arrays.
5. Process chunks: merge small/contextless chunks using title/headings; ensure 3-level hierarchy; include parent in child groups; keep all procedural steps together.
6. Group into logical/topical arrays with 3-level hierarchy.
7. Output JSON without backticks and code blocks: {"chunks": [["id1", "id2", "id3"], ...]}

EXAMPLES

Example 1: Missing Level

Input:
[
  {"id": "heading_1", "type": "heading",
   "text": "EXCESS BAGGAGE CHARGES", "parent_heading": null},
  {"id": "heading_2", "type": "heading",
   "text": "Packing heavy?",
   "parent_heading": "EXCESS BAGGAGE CHARGES"},
  {"id": "text_3", "type": "text",
   "text": "Fly without baggage worries...",
   "parent_heading": "Packing heavy?"},
  {"id": "text_4", "type": "text",
   "text": "Fees apply per kg.",
   "parent_heading": "Packing heavy?"}
]

Output:
{"chunks": [["heading_1", "heading_2", "text_3", "text_4"]]}

Note: heading_1 = L1, heading_2 = L3. Missing L2 filled with best-matching existing heading. Cookies filtered out.

Example 2: Procedural Steps (MUST Stay Together)

Input:
[
  {"id": "heading_1", "type": "heading",
   "text": "How to Change a Tyre", "parent_heading": null},
  {"id": "heading_2", "type": "heading",
   "text": "Steps to Change a Tyre",
   "parent_heading": "How to Change a Tyre"},
  {"id": "heading_3", "type": "heading",
   "text": "1. Park Safely",
   "parent_heading": "Steps to Change a Tyre"},
  {"id": "text_4", "type": "text",
   "text": "Pull over to a safe location...",
   "parent_heading": "1. Park Safely"},
  {"id": "heading_5", "type": "heading",
   "text": "2. Gather Tools",
   "parent_heading": "Steps to Change a Tyre"},
  {"id": "text_6", "type": "text",
   "text": "You will need: spare tyre, jack...",
   "parent_heading": "2. Gather Tools"},
  {"id": "heading_7", "type": "heading",
   "text": "3. Remove the Wheel Cover",
   "parent_heading": "Steps to Change a Tyre"},
  {"id": "text_8", "type": "text",
   "text": "Use the flat end of the wrench...",
   "parent_heading": "3. Remove the Wheel Cover"},
  {"id": "heading_9", "type": "heading",
   "text": "4. Loosen the Lug Nuts",
   "parent_heading": "Steps to Change a Tyre"},
  {"id": "text_10", "type": "text",
   "text": "Use the lug wrench to turn...",
   "parent_heading": "4. Loosen the Lug Nuts"}
]

Output:
{"chunks": [["heading_1", "heading_2", "heading_3", "text_4",
"heading_5", "text_6", "heading_7", "text_8", "heading_9",
"text_10"]]}

Note: All procedural steps (1-4) are grouped together in a SINGLE chunk array. Never split sequential steps into separate chunks.)PROMPT";

/// Appended to the user turn when the first plan response could not be parsed.
inline constexpr std::string_view planner_retry_instruction =
    "Your previous response could not be parsed. Respond with ONLY the JSON object "
    "{\"chunks\": [[\"id1\", \"id2\", ...], ...]} using existing chunk IDs. "
    "Do not use code fences, backticks, or any surrounding commentary.";

/// System prompt for the full-text rewriting chunker used as a comparison method.
inline constexpr std::string_view agentic_system = R"PROMPT(You are to segment the provided Markdown into fully contextual chunks while strictly preserving original content. This is a formatting only task—no text, links, hyperlinks, or images must be removed, skipped, paraphrased, or summarized.

YOUR INSTRUCTIONS

1. Reading and Understanding

Read all markdown content carefully.

2. Heading Structure

Always generate a 2 or 3-level heading structure for every chunk. Keep similar chunks into same headings:
- First-level heading: Document or product title
- Second-level heading: Major section inside the document (e.g., "Features", "Amenities", "Itinerary")
- Third-level heading: Specific subtopic within that section

3. Content Preservation

DO NOT alter, paraphrase, shorten, or skip any markdown content. All text, hyperlinks, links, formatting, images, image links, and elements must remain exactly as in the original markdown and present in the output chunks.

4. Chunking Strategy

Do not over chunk. Keep similar chunks together in same headings or use just two levels of headings.

5. Grouping Related Content

Keep all related content together:
- Always keep full numbered lists, bullet points, and related paragraphs in the same chunk
- Never split tables, figures, code blocks, or other complete elements

6. Table Formatting

When working with tables: Format using proper markdown table syntax (pipes | and hyphens -).

OUTPUT REQUIREMENTS

Output a list of chunks where each chunk starts with a full 2 or 3-level heading and remove all empty or no-finding chunks. Use this exact format:

[HEAD]main_heading > section_heading > chunk_heading[/HEAD]
chunk content 1

[HEAD]main_heading > section_heading[/HEAD]
chunk content 2

Ensure every chunk is clear, fully contextual, and no data is missing.)PROMPT";

}  // namespace wrac::prompts
