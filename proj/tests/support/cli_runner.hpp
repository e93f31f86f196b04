#pragma once

// Drives the command line binary as a subprocess and captures its output.

#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace sigf::testing {

struct CliResult {
    int status = -1;
    std::string out;
    std::string err;
};

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

inline std::string fresh_dir(const std::string& tag) {
    namespace fs = std::filesystem;
    static std::atomic<int> counter{0};
    const auto dir = fs::temp_directory_path() /
                     ("sigf_" + tag + "_" + std::to_string(::getpid()) + "_" +
                      std::to_string(counter++));
    fs::create_directories(dir);
    return dir.string();
}

// Runs `bin args...` with workdir as the working directory. stdout/stderr
// are captured through temp files; status is the exit code.
inline CliResult run_cli(const std::string& bin, const std::string& args,
                         const std::string& workdir) {
    static std::atomic<int> counter{0};
    const int id = counter++;
    const std::string out_path =
        workdir + "/.cli_out_" + std::to_string(id) + ".txt";
    const std::string err_path =
        workdir + "/.cli_err_" + std::to_string(id) + ".txt";
    const std::string cmd = "cd '" + workdir + "' && '" + bin + "' " + args + " >'" +
                            out_path + "' 2>'" + err_path + "'";
    const int rc = std::system(cmd.c_str());
    CliResult res;
    if (rc != -1 && WIFEXITED(rc)) res.status = WEXITSTATUS(rc);
    res.out = read_text_file(out_path);
    res.err = read_text_file(err_path);
    std::remove(out_path.c_str());
    std::remove(err_path.c_str());
    return res;
}

}  // namespace sigf::testing
