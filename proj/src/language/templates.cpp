#include "grounded/language/templates.hpp"

#include "grounded/error.hpp"

namespace grounded::language {

const std::vector<TemplateInfo>& template_table() {
  using C = Category;
  static const std::vector<TemplateInfo> table = {
      {TemplateId::AskProperty, "ask-property", "Is {word} a color, size, or shape?", true,
       {C::PropertyAnswer, C::NeverMind}},
      {TemplateId::AskGoal, "ask-goal", "What is the goal of {verb}?", true,
       {C::DescriptiveSentence, C::GoalDescription, C::NeverMind}},
      {TemplateId::AskNextAction, "ask-next-action", "What action should I take next?", true,
       {C::VerbCommand, C::NeverMind}},
      {TemplateId::AskNextTask, "ask-next-task", "Waiting for next task.", false, {}},
      {TemplateId::AskExample, "ask-example", "Please show me an example of {word}.", true,
       {C::DescriptiveSentence, C::NeverMind}},
      {TemplateId::AskPrepExample, "ask-prep-example", "Please describe an example of {prep}.", true,
       {C::DescriptiveSentence, C::NeverMind}},
      {TemplateId::AskWhich, "ask-which", "Which {np}?", true,
       {C::WhichAnswer, C::NPFragment, C::NeverMind}},
      {TemplateId::AnswerWord, "answer-word", "{word}", false, {}},
      {TemplateId::AnswerDontKnow, "answer-dont-know", "I don't know.", false, {}},
      {TemplateId::AnswerYes, "answer-yes", "Yes.", false, {}},
      {TemplateId::AnswerNo, "answer-no", "No.", false, {}},
      {TemplateId::AnswerList, "answer-list", "{items}.", false, {}},
      {TemplateId::AnswerNothing, "answer-nothing", "Nothing.", false, {}},
      {TemplateId::Acknowledge, "acknowledge", "Ok.", false, {}},
      {TemplateId::ReportCannot, "report-cannot", "I cannot {action}.", false, {}},
      {TemplateId::AskRephrase, "ask-rephrase", "I do not understand.", false, {}},
  };
  return table;
}

const TemplateInfo& template_info(TemplateId id) {
  for (auto& t : template_table())
    if (t.id == id) return t;
  throw std::logic_error("template table incomplete");
}

TemplateId template_from_name(const std::string& name) {
  for (auto& t : template_table())
    if (name == t.name) return t.id;
  throw FormatError("unknown template " + name);
}

std::string generate(TemplateId id, const Bindings& bindings) {
  std::string pat = template_info(id).pattern, out;
  for (std::size_t i = 0; i < pat.size(); ++i) {
    if (pat[i] != '{') {
      out += pat[i];
      continue;
    }
    auto close = pat.find('}', i);
    auto hole = pat.substr(i + 1, close - i - 1);
    auto it = bindings.find(hole);
    if (it == bindings.end())
      throw MissingBinding(std::string("template ") + template_info(id).name + " needs {" + hole + "}");
    out += it->second;
    i = close;
  }
  return out;
}

}  // namespace grounded::language
