#pragma once

#include <iostream>
#include <string>

#include "kglink/config.hpp"
#include "kglink/generator.hpp"

namespace kglink {

// CLI entry points. Each returns a process exit code (0 on success) and
// reports errors on `err`; heavy lifting lives in the library so the
// commands stay testable in-process. On failure a run directory, if one
// was started, gets a status.json marker with the error message.

int cmd_index(const Config& cfg, std::ostream& out, std::ostream& err);
int cmd_annotate(const Config& cfg, std::ostream& out, std::ostream& err,
                 const std::string& serialized_dump_path = "");
int cmd_train(const Config& cfg, std::ostream& out, std::ostream& err);
int cmd_eval(const Config& cfg, std::ostream& out, std::ostream& err);
int cmd_ablate(const Config& cfg, std::ostream& out, std::ostream& err);
int cmd_gen_corpus(const GenKnobs& knobs, const std::string& dir, std::ostream& out,
                   std::ostream& err);

}  // namespace kglink
