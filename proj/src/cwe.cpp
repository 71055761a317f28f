#include "taintjs/cwe.hpp"

#include "taintjs/common.hpp"

namespace taintjs {

namespace {

const std::vector<CweContext>& catalog() {
    static const std::vector<CweContext> entries = {
        {79, "Improper Neutralization of Input During Web Page Generation",
         "The product does not neutralize user-controllable input before it "
         "is placed in output that is used as a web page served to other "
         "users, enabling cross-site scripting.",
         {"Execute unauthorized code in the victim's browser",
          "Bypass protection mechanisms", "Read application data"},
         "URL fragments, request parameters, form field values, and any "
         "externally supplied text that reaches rendering code.",
         "HTML string construction (template literals or concatenation that "
         "builds markup), innerHTML assignments, document.write calls, and "
         "attribute values such as href interpolated from input."},
        {78, "Improper Neutralization of Special Elements used in an OS "
             "Command",
         "The product constructs all or part of an OS command using "
         "externally influenced input without neutralizing special elements.",
         {"Execute unauthorized commands", "Full system compromise"},
         "Process arguments, request fields, and configuration values "
         "concatenated into command strings.",
         "Calls to exec, execSync, or spawn whose command or argument "
         "strings derive from input."},
        {94, "Improper Control of Generation of Code",
         "The product constructs a code segment using externally influenced "
         "input without neutralizing elements that modify its syntax or "
         "behavior.",
         {"Execute unauthorized code", "Bypass protection mechanisms"},
         "Any externally supplied string that reaches dynamic evaluation.",
         "eval calls and Function constructor invocations whose argument "
         "derives from input."},
        {22, "Improper Limitation of a Pathname to a Restricted Directory",
         "The product uses external input to construct a pathname without "
         "neutralizing sequences such as '..' that resolve outside the "
         "restricted directory.",
         {"Read or modify arbitrary files", "Information disclosure"},
         "Request fields and arguments used to build file paths.",
         "Filesystem calls (readFile, writeFile, createReadStream, open, "
         "unlink and their sync variants) whose path argument derives from "
         "input."},
        {89, "Improper Neutralization of Special Elements used in an SQL "
             "Command",
         "The product constructs an SQL command using externally influenced "
         "input without neutralizing special elements.",
         {"Read or modify application data", "Bypass authentication"},
         "Request fields concatenated into query strings.",
         "query or execute calls whose statement string derives from input."},
        {915, "Improperly Controlled Modification of Dynamically-Determined "
              "Object Attributes",
         "The product receives input that specifies attributes to modify and "
         "does not restrict which attributes can be changed, enabling "
         "prototype pollution and mass assignment.",
         {"Modify application data", "Unexpected state and code execution"},
         "Parsed request bodies and merged configuration objects whose keys "
         "derive from input.",
         "Computed property writes obj[key] = value where the key or value "
         "derives from input, especially on merged objects."},
        {601, "URL Redirection to Untrusted Site",
         "The product accepts user-controlled input that specifies a link to "
         "an external site and uses it in a redirect.",
         {"Phishing", "Bypass protection mechanisms"},
         "Request parameters and fragments holding URLs.",
         "Assignments to location.href and redirect calls whose target "
         "derives from input."},
    };
    return entries;
}

}  // namespace

const CweContext& cwe_context(int id) {
    for (const auto& c : catalog())
        if (c.id == id) return c;
    throw Error("unknown CWE id: " + std::to_string(id));
}

std::vector<int> cwe_catalog_ids() {
    std::vector<int> ids;
    for (const auto& c : catalog()) ids.push_back(c.id);
    return ids;
}

}  // namespace taintjs
