// Copyright 2026 The metametrics Authors
// SPDX-License-Identifier: Apache-2.0
//
// Small popen-based runner for end-to-end CLI tests. The binary path comes in
// via the METAMETRICS_CLI_PATH compile definition.

#ifndef METAMETRICS_TESTS_SUPPORT_RUN_CLI_HPP
#define METAMETRICS_TESTS_SUPPORT_RUN_CLI_HPP

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

namespace metametrics::testsupport {

inline std::string cli_path() {
#ifdef METAMETRICS_CLI_PATH
    return METAMETRICS_CLI_PATH;
#else
    throw std::runtime_error("METAMETRICS_CLI_PATH not defined");
#endif
}

struct CliResult {
    int exit_code = -1;
    std::string out;
};

/// Runs `args` against the CLI binary, capturing stdout (and stderr when
/// merged). `env_prefix` may carry VAR=value assignments.
inline CliResult run_cli(const std::string& args, bool merge_stderr = true,
                         const std::string& env_prefix = {}) {
    std::string cmd = env_prefix + "'" + cli_path() + "' " + args;
    if (merge_stderr) cmd += " 2>&1";
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (!pipe) throw std::runtime_error("popen failed for: " + cmd);
    CliResult result;
    std::array<char, 4096> buf;
    std::size_t n;
    while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) {
        result.out.append(buf.data(), n);
    }
    const int status = ::pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

/// Fresh scratch directory under the system temp root; removed on destruction.
class TempDir {
public:
    TempDir() {
        std::string tmpl =
            (std::filesystem::temp_directory_path() / "metametrics-test-XXXXXX").string();
        if (!::mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
        path_ = tmpl;
    }

    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }

    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const noexcept { return path_; }

    std::string file(const std::string& name) const { return (path_ / name).string(); }

    std::string write(const std::string& name, const std::string& content) const {
        const std::string p = file(name);
        std::ofstream out(p, std::ios::binary);
        out << content;
        return p;
    }

private:
    std::filesystem::path path_;
};

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::string content((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
    return content;
}

}  // namespace metametrics::testsupport

#endif  // METAMETRICS_TESTS_SUPPORT_RUN_CLI_HPP
