#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "abe/io.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
};

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("abe_cli_test_" + std::to_string(::getpid()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    payload_ = std::string(3000, '\0');
    for (std::size_t i = 0; i < payload_.size(); ++i) payload_[i] = static_cast<char>(i * 131 + 7);
    abe::write_file_atomic(dir_ / "msg.bin", std::string_view(payload_));
  }
  void TearDown() override { fs::remove_all(dir_); }

  // Runs the tool with ABE_HOME pointing into the scratch directory; stderr is merged.
  Result run(const std::string& args) {
    std::string cmd = "cd '" + dir_.string() + "' && ABE_HOME='" + (dir_ / "home").string() + "' '" ABE_CLI_PATH "' " +
                      args + " 2>&1";
    FILE* p = ::popen(cmd.c_str(), "r");
    std::string out;
    std::array<char, 4096> buf;
    while (std::size_t n = std::fread(buf.data(), 1, buf.size(), p)) out.append(buf.data(), n);
    int status = ::pclose(p);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
  }

  std::string slurp(const std::string& name) {
    auto b = abe::read_file(dir_ / name);
    return {b.begin(), b.end()};
  }

  fs::path dir_;
  std::string payload_;
};

}  // namespace

TEST_F(Cli, CpRoundTrip) {
  ASSERT_EQ(run("setup --scheme cp --level 80 --seed 1").code, 0);
  EXPECT_TRUE(fs::exists(dir_ / "home" / "params.pub"));
  EXPECT_TRUE(fs::exists(dir_ / "home" / "master.key"));
  ASSERT_EQ(run("keygen --attrs 'doctor, ward=icu, age=42' --out alice.key --seed 2").code, 0);
  auto r = run("encrypt --scheme cp --policy 'doctor and (ward=icu or age > 60)' --in msg.bin --out msg.abe");
  ASSERT_EQ(r.code, 0) << r.out;
  r = run("decrypt --key alice.key --in msg.abe --out back.bin");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(slurp("back.bin"), payload_);

  ASSERT_EQ(run("keygen --attrs 'nurse, age=42' --out bob.key").code, 0);
  r = run("decrypt --key bob.key --in msg.abe --out nope.bin");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("error: PolicyNotSatisfied:"), std::string::npos) << r.out;
  EXPECT_FALSE(fs::exists(dir_ / "nope.bin"));
  EXPECT_FALSE(fs::exists(dir_ / "nope.bin.tmp"));
}

TEST_F(Cli, KpRoundTrip) {
  ASSERT_EQ(run("--keys kp setup --scheme kp --level 112").code, 0);
  auto r = run("keygen --keys kp --policy 'flu and (age < 40 or vip)' --out k.key");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_TRUE(fs::exists(dir_ / "kp" / "universe.pub"));
  r = run("encrypt --keys kp --attrs 'flu, age=30' --in msg.bin --out m.abe");
  ASSERT_EQ(r.code, 0) << r.out;
  r = run("decrypt --keys kp --key k.key --in m.abe --out back.bin");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(slurp("back.bin"), payload_);

  r = run("encrypt --keys kp --attrs 'flu, age=50' --in msg.bin --out old.abe");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(run("decrypt --keys kp --key k.key --in old.abe --out x.bin").code, 1);
  r = run("encrypt --keys kp --attrs 'measles' --in msg.bin --out x.abe");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("UnknownAttribute"), std::string::npos);
}

TEST_F(Cli, SeedMakesOutputReproducible) {
  ASSERT_EQ(run("setup --scheme cp --seed 9").code, 0);
  ASSERT_EQ(run("encrypt --policy 'a or b' --in msg.bin --out one.abe --seed 4").code, 0);
  ASSERT_EQ(run("encrypt --policy 'a or b' --in msg.bin --out two.abe --seed 4").code, 0);
  EXPECT_EQ(slurp("one.abe"), slurp("two.abe"));
  ASSERT_EQ(run("encrypt --policy 'a or b' --in msg.bin --out three.abe").code, 0);
  EXPECT_NE(slurp("one.abe"), slurp("three.abe"));
}

TEST_F(Cli, PolicyExplain) {
  auto r = run("policy --explain 'A < 32768'");
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("leaves: 3\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("and 1,"), std::string::npos) << r.out;
  r = run("policy 'a and b and c or d'");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "((a and b and c) or d)\n");
  r = run("policy 'a and (b'");
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.out.rfind("error: ParseError:", 0), 0u) << r.out;
}

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("setup --scheme rsa").code, 2);
  EXPECT_EQ(run("setup --scheme cp --level 96").code, 2);
  auto r = run("bench --attrs 0 --csv b.csv");
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(r.out.rfind("error: UsageError:", 0), 0u) << r.out;
  EXPECT_EQ(run("bench --trials 2 --csv b.csv").code, 2);
  EXPECT_FALSE(fs::exists(dir_ / "b.csv"));
  ASSERT_EQ(run("setup --scheme cp").code, 0);
  EXPECT_EQ(run("encrypt --attrs a --in msg.bin --out x.abe").code, 2);
  EXPECT_EQ(run("decrypt --key missing.key --in msg.bin --out x.bin").code, 1);
  EXPECT_EQ(run("--help").code, 0);
}

TEST_F(Cli, BenchWritesCsvSummaryAndPlots) {
  auto r = run("bench --scheme cp,kp --levels 80 --attrs 1..3 --trials 3 --warmup 0 --csv out/b.csv "
               "--svg-dir plots --quiet --profile");
  ASSERT_EQ(r.code, 0) << r.out;
  std::istringstream csv(slurp("out/b.csv"));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line,
            "scheme,op,level,n_attrs,trial,wall_time_ms,peak_mem_bytes,exp_g1,exp_g2,exp_gt,pairings,hash_to_group,"
            "energy_est_j");
  int rows = 0;
  while (std::getline(csv, line)) ++rows;
  EXPECT_EQ(rows, 2 * 2 * 3 * 3);
  EXPECT_NE(slurp("out/b.summary.csv").find("mean_ms,ci95_ms"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir_ / "plots" / "cp_encrypt.svg"));
  EXPECT_TRUE(fs::exists(dir_ / "plots" / "kp_decrypt.svg"));
  EXPECT_NE(r.out.find("pairing"), std::string::npos);
}

TEST_F(Cli, SimulatorOverLoopback) {
  ASSERT_EQ(run("setup --scheme cp --seed 3").code, 0);
  ASSERT_EQ(run("keygen --attrs 'a0, a1, a2, a3, a4' --out sink.key").code, 0);
  Result collected;
  std::thread collector([&] {
    collected = run("sim-collect --key sink.key --bind 127.0.0.1:39517 --idle-exit 1500 --out-dir recv "
                    "--report collect.csv");
  });
  std::this_thread::sleep_for(std::chrono::milliseconds(500));
  auto sent = run("sim-send --policy 'a0 and a1 and a2 and a3 and a4' --server 127.0.0.1:39517 --duration 2 "
                  "--work-dir work --report send.csv");
  collector.join();
  ASSERT_EQ(sent.code, 0) << sent.out;
  ASSERT_EQ(collected.code, 0) << collected.out;
  EXPECT_NE(sent.out.find("failed 0"), std::string::npos) << sent.out;
  EXPECT_NE(collected.out.find("policy failures 0"), std::string::npos) << collected.out;
  EXPECT_EQ(fs::file_size(dir_ / "recv" / "ecg-0.bin"), 1500u);
  EXPECT_EQ(fs::file_size(dir_ / "recv" / "ecg-1.bin"), 1500u);
  EXPECT_EQ(slurp("collect.csv").rfind("cycle,stream_type,seal_ms,send_ms,end_to_end_ms,status\n", 0), 0u);
}
