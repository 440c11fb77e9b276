#pragma once

#include <string>

#include "wrac/document.hpp"
#include "wrac/html.hpp"
#include "wrac/markdown.hpp"
#include "wrac/tokens.hpp"

namespace wrac {

/// Markdown body of a document: converted for HTML sources, verbatim otherwise.
inline std::string document_markdown(const SourceDocument& doc) {
    return doc.media == Media::html ? html_to_markdown(doc.raw) : doc.raw;
}

/// Full parse: HTML conversion (when needed) followed by unit extraction.
/// Line numbers refer to the post-conversion markdown.
inline ParsedDocument parse_document(const SourceDocument& doc,
                                     const TokenCounter& tokens = default_token_counter()) {
    if (doc.media == Media::markdown) return parse_markdown(doc, tokens);
    SourceDocument converted = doc;
    converted.media = Media::markdown;
    converted.raw = html_to_markdown(doc.raw);
    return parse_markdown(converted, tokens);
}

}  // namespace wrac
