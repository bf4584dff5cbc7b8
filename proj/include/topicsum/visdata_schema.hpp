#pragma once

// JSON Schema for visdata.json and a validator built on RapidJSON's
// draft-04 implementation. schema/visdata.schema.json carries the same
// document for external consumers.

#include <rapidjson/document.h>
#include <rapidjson/error/en.h>
#include <rapidjson/schema.h>
#include <rapidjson/stringbuffer.h>
#include <rapidjson/writer.h>

#include <string>
#include <string_view>
#include <vector>

#include "topicsum/error.hpp"

namespace topicsum {

inline constexpr std::string_view kVisdataSchema = R"json({
  "$schema": "http://json-schema.org/draft-04/schema#",
  "title": "visdata",
  "type": "object",
  "required": ["schema_version", "lambda_step", "R", "mds", "tinfo"],
  "additionalProperties": false,
  "properties": {
    "schema_version": {"type": "string", "enum": ["1.0"]},
    "lambda_step": {"type": "number", "exclusiveMinimum": true, "minimum": 0, "maximum": 1},
    "R": {"type": "integer", "minimum": 1},
    "mds": {
      "type": "array",
      "minItems": 1,
      "items": {
        "type": "object",
        "required": ["topic", "x", "y", "prevalence"],
        "additionalProperties": false,
        "properties": {
          "topic": {"type": "integer", "minimum": 1},
          "x": {"type": "number"},
          "y": {"type": "number"},
          "prevalence": {"type": "number", "minimum": 0, "maximum": 100}
        }
      }
    },
    "tinfo": {
      "type": "array",
      "minItems": 1,
      "items": {
        "type": "object",
        "required": ["term", "category", "freq", "total", "logprob", "loglift"],
        "additionalProperties": false,
        "properties": {
          "term": {"type": "string", "minLength": 1},
          "category": {"type": "string", "pattern": "^(Default|Topic[1-9][0-9]*)$"},
          "freq": {"type": "number", "minimum": 0},
          "total": {"type": "number", "minimum": 0},
          "logprob": {"type": "number", "maximum": 0},
          "loglift": {"type": "number"}
        }
      }
    }
  }
}
)json";

struct SchemaReport {
  bool valid = false;
  std::vector<std::string> errors;  // JSON pointer of the failing instance plus the violated keyword
};

inline SchemaReport validate_against_schema(std::string_view document, std::string_view schema_text) {
  rapidjson::Document schema_doc;
  schema_doc.Parse(schema_text.data(), schema_text.size());
  if (schema_doc.HasParseError())
    fail(ErrorKind::format, std::string("schema: ") + rapidjson::GetParseError_En(schema_doc.GetParseError()));
  const rapidjson::SchemaDocument schema(schema_doc);

  SchemaReport report;
  rapidjson::Document doc;
  doc.Parse(document.data(), document.size());
  if (doc.HasParseError()) {
    report.errors.push_back(std::string("parse error at offset ") + std::to_string(doc.GetErrorOffset()) +
                            ": " + rapidjson::GetParseError_En(doc.GetParseError()));
    return report;
  }
  rapidjson::SchemaValidator validator(schema);
  if (doc.Accept(validator)) {
    report.valid = true;
    return report;
  }
  rapidjson::StringBuffer where;
  validator.GetInvalidDocumentPointer().StringifyUriFragment(where);
  report.errors.push_back(std::string(where.GetString()) + ": violates '" +
                          validator.GetInvalidSchemaKeyword() + "'");
  return report;
}

inline SchemaReport validate_visdata(std::string_view document) {
  return validate_against_schema(document, kVisdataSchema);
}

}  // namespace topicsum
