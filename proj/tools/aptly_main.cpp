#include <csignal>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "aptly/blocks.hpp"
#include "aptly/config.hpp"
#include "aptly/io.hpp"
#include "aptly/parser.hpp"
#include "aptly/pipeline.hpp"
#include "aptly/printer.hpp"
#include "aptly/prompt.hpp"
#include "aptly/service.hpp"

namespace {

using namespace aptly;

constexpr int kExitOk = 0;
constexpr int kExitUser = 1;
constexpr int kExitConfig = 2;
constexpr int kExitBackend = 3;

void report(const std::string& origin, const Diagnostics& diags) {
  for (const auto& d : diags) std::cerr << origin << ":" << format_diagnostic(d) << "\n";
}

struct GenFlags {
  std::string corpus;
  std::size_t k = kDefaultK;
  std::string backend = "mock-echo";
  std::string model = "default";
  std::string script;
  std::string url;
  std::string api_key_env;
  std::size_t dim = kDefaultDimension;
  int timeout = 60;
  bool show_prompt = false;
};

void add_gen_flags(CLI::App* cmd, GenFlags& f) {
  cmd->add_option("--corpus", f.corpus, "Example-pair corpus (JSON Lines)")->required();
  cmd->add_option("--k", f.k, "Number of example pairs in the prompt")->capture_default_str();
  cmd->add_option("--backend", f.backend, "Completion backend")
      ->check(CLI::IsMember({"mock-echo", "scripted", "remote"}))
      ->capture_default_str();
  cmd->add_option("--model", f.model, "Model id passed to the backend")->capture_default_str();
  cmd->add_option("--script", f.script, "Response script for the scripted backend");
  cmd->add_option("--url", f.url, "Completions endpoint for the remote backend");
  cmd->add_option("--api-key-env", f.api_key_env, "Environment variable holding the remote API key");
  cmd->add_option("--dim", f.dim, "Mock embedding dimension")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--timeout", f.timeout, "Backend timeout in seconds")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_flag("--show-prompt", f.show_prompt, "Print the synthesized prompt to standard error");
}

class Tool {
 public:
  explicit Tool(std::string registry_path) : registry_path_(std::move(registry_path)) {}

  // Loads the registry lazily; returns nullptr after reporting on failure.
  const Registry* registry() {
    if (!registry_) {
      auto r = load_registry(registry_path_.empty() ? seed_registry_path() : std::filesystem::path(registry_path_));
      if (!r) {
        report(registry_path_.empty() ? seed_registry_path().string() : registry_path_, r.error());
        return nullptr;
      }
      registry_ = std::move(*r);
    }
    return &*registry_;
  }

  // Reads, parses and validates a source file.
  std::optional<Program> load_program(const std::string& file, int& exit_code) {
    auto text = read_text_file(file);
    if (!text) {
      report(file, text.error());
      exit_code = kExitUser;
      return std::nullopt;
    }
    const Registry* reg = registry();
    if (!reg) {
      exit_code = kExitConfig;
      return std::nullopt;
    }
    auto program = parse(*text);
    if (!program) {
      report(file, program.error());
      exit_code = kExitUser;
      return std::nullopt;
    }
    if (auto diags = validate(*program, *reg); !diags.empty()) {
      report(file, diags);
      exit_code = kExitUser;
      return std::nullopt;
    }
    return std::move(*program);
  }

  int cmd_parse(const std::string& file) {
    int rc = kExitOk;
    auto program = load_program(file, rc);
    if (!program) return rc;
    std::cout << ast_summary_json(*program);
    return kExitOk;
  }

  int cmd_compile(const std::string& file, const std::string& out) {
    int rc = kExitOk;
    auto program = load_program(file, rc);
    if (!program) return rc;
    auto blocks = compile(*program, *registry());
    if (!blocks) {
      report(file, blocks.error());
      return kExitUser;
    }
    const std::string doc = blocks_to_json(*blocks);
    if (out.empty() || out == "-") {
      std::cout << doc;
      return kExitOk;
    }
    if (auto w = write_text_file(out, doc); !w) {
      report(out, w.error());
      return kExitUser;
    }
    return kExitOk;
  }

  int cmd_decompile(const std::string& file) {
    auto text = read_text_file(file);
    if (!text) {
      report(file, text.error());
      return kExitUser;
    }
    const Registry* reg = registry();
    if (!reg) return kExitConfig;
    auto blocks = blocks_from_json(*text);
    if (!blocks) {
      report(file, blocks.error());
      return kExitUser;
    }
    auto program = decompile(*blocks, *reg);
    if (!program) {
      report(file, program.error());
      return kExitUser;
    }
    std::cout << canonical_print(*program);
    return kExitOk;
  }

  int cmd_generate(const GenFlags& f, const std::string& description, const std::string* edit_file,
                   const std::string& instruction) {
    const Registry* reg = registry();
    if (!reg) return kExitConfig;
    auto corpus = corpus_load(f.corpus, *reg);
    if (!corpus) {
      report(f.corpus, corpus.error());
      return kExitConfig;
    }
    BackendConfig bc{f.backend, f.url, f.api_key_env, f.script};
    auto backend = make_backend(bc);
    if (!backend) {
      report("aptly", backend.error());
      return kExitConfig;
    }
    MockEmbedder embedder(f.dim);
    const Corpus built = corpus_build(std::move(*corpus), embedder);
    const GenerationContext ctx{*reg, built, embedder, **backend};
    GenerationOptions options;
    options.k = f.k;
    options.model = f.model;
    options.timeout = std::chrono::seconds(f.timeout);

    GenerationOutcome outcome = [&]() -> GenerationOutcome {
      if (!edit_file) return generate(description, ctx, options);
      auto current = read_text_file(*edit_file);
      if (!current) return Unexpected<GenerationFailure>{GenerationFailure{current.error(), {}, {}, {}, 0}};
      return edit(*current, instruction, ctx, options);
    }();

    if (outcome) {
      if (f.show_prompt) std::cerr << outcome->prompt;
      std::cout << outcome->canonical_code;
      return kExitOk;
    }
    const auto& failure = outcome.error();
    if (f.show_prompt && !failure.prompt.empty()) std::cerr << failure.prompt;
    report(edit_file ? *edit_file : "gen", failure.diagnostics);
    for (std::size_t i = 0; i < failure.raw_completions.size(); ++i) {
      std::cerr << "--- raw completion " << (i + 1) << " ---\n" << failure.raw_completions[i] << "\n";
    }
    return has_code(failure.diagnostics, DiagCode::Backend) ? kExitBackend : kExitUser;
  }

  int cmd_corpus_build(const std::string& path, std::size_t dim) {
    const Registry* reg = registry();
    if (!reg) return kExitConfig;
    auto corpus = corpus_load(path, *reg);
    if (!corpus) {
      report(path, corpus.error());
      return kExitUser;
    }
    const Corpus built = corpus_build(std::move(*corpus), MockEmbedder(dim));
    if (auto w = corpus_save(built, path); !w) {
      report(path, w.error());
      return kExitUser;
    }
    std::cerr << "embedded " << built.pairs.size() << " pairs (dimension " << dim << ")\n";
    return kExitOk;
  }

  int cmd_serve(const std::string& config_path) {
    auto cfg = load_config(config_path);
    if (!cfg) {
      report(config_path, cfg.error());
      return kExitConfig;
    }
    auto service = Service::from_config(*cfg);
    if (!service) {
      report(config_path, service.error());
      return kExitConfig;
    }
    active_service() = service->get();
    std::signal(SIGINT, [](int) {
      if (active_service()) active_service()->stop();
    });
    std::signal(SIGTERM, [](int) {
      if (active_service()) active_service()->stop();
    });
    std::cerr << "listening on " << cfg->listen_host << ":" << cfg->listen_port << "\n";
    const bool ok = (*service)->listen();
    active_service() = nullptr;
    if (!ok) {
      std::cerr << config_path << ": error: E_CONFIG: cannot listen on " << cfg->listen_host << ":"
                << cfg->listen_port << "\n";
      return kExitConfig;
    }
    return kExitOk;
  }

 private:
  static Service*& active_service() {
    static Service* s = nullptr;
    return s;
  }

  std::string registry_path_;
  std::optional<Registry> registry_;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Aptly: parse, compile and generate Aptly programs"};
  app.require_subcommand(1);
  std::string registry;
  app.add_option("--registry", registry, "Component registry file (default: bundled seed registry)");

  std::string file, out, description, instruction, path, config;
  std::size_t dim = kDefaultDimension;
  GenFlags gen_flags, edit_flags;

  auto* parse_cmd = app.add_subcommand("parse", "Parse and validate a source file; print an AST summary");
  parse_cmd->add_option("file", file)->required();

  auto* compile_cmd = app.add_subcommand("compile", "Compile a source file to a block document");
  compile_cmd->add_option("file", file)->required();
  compile_cmd->add_option("-o,--output", out, "Output file (default: standard output)");

  auto* decompile_cmd = app.add_subcommand("decompile", "Print the canonical source of a block document");
  decompile_cmd->add_option("file", file)->required();

  auto* gen_cmd = app.add_subcommand("gen", "Generate code from an app description");
  gen_cmd->add_option("description", description)->required();
  add_gen_flags(gen_cmd, gen_flags);

  auto* edit_cmd = app.add_subcommand("edit", "Rewrite a source file according to an instruction");
  edit_cmd->add_option("file", file)->required();
  edit_cmd->add_option("instruction", instruction)->required();
  add_gen_flags(edit_cmd, edit_flags);

  auto* corpus_cmd = app.add_subcommand("corpus", "Corpus maintenance");
  corpus_cmd->require_subcommand(1);
  auto* build_cmd = corpus_cmd->add_subcommand("build", "Embed every pair of a corpus in place");
  build_cmd->add_option("path", path)->required();
  build_cmd->add_option("--dim", dim, "Embedding dimension")->check(CLI::PositiveNumber)->capture_default_str();

  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP service");
  serve_cmd->add_option("--config", config, "Service config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitUser;
  }

  Tool tool(registry);
  if (*parse_cmd) return tool.cmd_parse(file);
  if (*compile_cmd) return tool.cmd_compile(file, out);
  if (*decompile_cmd) return tool.cmd_decompile(file);
  if (*gen_cmd) return tool.cmd_generate(gen_flags, description, nullptr, {});
  if (*edit_cmd) return tool.cmd_generate(edit_flags, {}, &file, instruction);
  if (*build_cmd) return tool.cmd_corpus_build(path, dim);
  if (*serve_cmd) return tool.cmd_serve(config);
  return kExitUser;
}
