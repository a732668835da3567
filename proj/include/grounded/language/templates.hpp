#pragma once

#include <map>
#include <string>
#include <vector>

#include "grounded/language/parser.hpp"

namespace grounded::language {

enum class TemplateId {
  AskProperty,
  AskGoal,
  AskNextAction,
  AskNextTask,
  AskExample,
  AskPrepExample,
  AskWhich,
  AnswerWord,
  AnswerDontKnow,
  AnswerYes,
  AnswerNo,
  AnswerList,
  AnswerNothing,
  Acknowledge,
  ReportCannot,
  AskRephrase,
};

using Bindings = std::map<std::string, std::string>;

struct TemplateInfo {
  TemplateId id;
  const char* name;
  const char* pattern;  // {hole} placeholders
  bool expects_reply;
  std::vector<Category> replies;  // categories a well-formed reply parses to
};

const std::vector<TemplateInfo>& template_table();
const TemplateInfo& template_info(TemplateId id);
TemplateId template_from_name(const std::string& name);

std::string generate(TemplateId id, const Bindings& bindings);

}  // namespace grounded::language
