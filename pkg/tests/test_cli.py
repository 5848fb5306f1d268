import csv
import subprocess
import sys
from fractions import Fraction

import pytest

from pcdnsched import cli, mmec, scengen
from pcdnsched.model import schedule_from_text, validate_schedule
from pcdnsched.scengen import GenConfig

SMALL = ["--users", "8", "--videos", "16", "--peers", "4", "--slots", "4",
         "--storage", "4", "--capacity", "2", "--seed", "3"]


def read_rows(path):
    with open(path, newline="") as fp:
        return list(csv.reader(fp))


class TestTrialSeed:
    def test_stable_values(self):
        a = cli.trial_seed(0, "users", "50", 0)
        assert a == cli.trial_seed(0, "users", "50", 0)
        assert cli.trial_seed(0, "users", "50", 1) != a
        assert cli.trial_seed(0, "users", "60", 0) != a
        assert cli.trial_seed(1, "users", "50", 0) != a
        assert 0 <= a < 1 << 64

    def test_adding_trials_keeps_earlier_seeds(self):
        first = [cli.trial_seed(9, "alpha", "0.5", k) for k in range(3)]
        extended = [cli.trial_seed(9, "alpha", "0.5", k) for k in range(6)]
        assert extended[:3] == first


class TestSolve:
    def test_mmec_summary_and_dump(self, tmp_path, capsys):
        out = tmp_path / "schedule.txt"
        code = cli.main(["solve", *SMALL, "--algo", "mmec",
                         "--dump-schedule", str(out)])
        assert code == 0
        line = capsys.readouterr().out.strip()
        assert line.startswith("algo=mmec total=")
        assert "augmentations=32" in line  # 8 users * 4 slots
        schedule = schedule_from_text(out.read_text())
        scenario = scengen.generate(GenConfig(
            users=8, videos=16, peers=4, slots=4, storage=4, capacity=2, seed=3))
        assert validate_schedule(scenario, schedule) == []

    def test_zero_slots_is_usage_error(self):
        assert cli.main(["solve", "--slots", "0"]) == 1

    def test_sao_zero_iters(self, capsys):
        code = cli.main(["solve", *SMALL, "--algo", "sao", "--iters", "0"])
        assert code == 0
        assert "algo=sao total=" in capsys.readouterr().out

    def test_unknown_flag_exits_1(self):
        assert cli.main(["solve", "--frobnicate"]) == 1

    def test_unknown_algo_exits_1(self):
        assert cli.main(["solve", "--algo", "magic"]) == 1

    def test_config_file(self, tmp_path, capsys):
        config = tmp_path / "base.cfg"
        config.write_text(
            "users = 8\nvideos = 16\npeers = 4\nslots = 4\n"
            "storage = 4\ncapacity = 2\nseed = 3\n"
        )
        code = cli.main(["solve", "--config", str(config), "--algo", "mmec"])
        assert code == 0
        from_config = capsys.readouterr().out
        code = cli.main(["solve", *SMALL, "--algo", "mmec"])
        assert code == 0
        inline = capsys.readouterr().out
        # identical scenario, identical deterministic solver result
        assert from_config.split("runtime_ms")[0] == inline.split("runtime_ms")[0]

    def test_bad_config_file(self, tmp_path):
        config = tmp_path / "bad.cfg"
        config.write_text("wibble = 3\n")
        assert cli.main(["solve", "--config", str(config)]) == 1

    def test_missing_config_file(self, tmp_path):
        assert cli.main(["solve", "--config", str(tmp_path / "nope.cfg")]) == 1

    def test_flag_overrides_config(self, tmp_path, capsys):
        config = tmp_path / "base.cfg"
        config.write_text("users = 8\nvideos = 16\npeers = 0\nslots = 4\nseed = 3\n")
        code = cli.main(["solve", "--config", str(config), "--algo", "mmec"])
        assert code == 0
        cdn_only_total = capsys.readouterr().out.split()[1]
        assert cdn_only_total == "total=160"  # 8 users * 4 slots * cost 5

    def test_fractional_costs_render_exactly(self, capsys):
        code = cli.main(["solve", *SMALL, "--peer-cost", "1/2",
                         "--algo", "roos"])
        assert code == 0
        total = capsys.readouterr().out.split()[1].removeprefix("total=")
        assert Fraction(total) > 0  # "a/b" or integer string, never a float

    def test_dump_scenario_and_network(self, tmp_path):
        scen = tmp_path / "scenario.txt"
        net = tmp_path / "network.dimacs"
        code = cli.main(["solve", *SMALL, "--dump-scenario", str(scen),
                         "--dump-network", str(net)])
        assert code == 0
        from pcdnsched.model import scenario_from_text

        parsed = scenario_from_text(scen.read_text())
        assert parsed.num_users == 8
        assert net.read_text().splitlines()[1].startswith("p min ")


class TestSweep:
    def test_users_preset_row_count(self, tmp_path):
        out = tmp_path / "users.csv"
        code = cli.main([
            "sweep", "--preset", "users", "--trials", "1", "--algos", "mmec",
            "--out", str(out), "--pathfinder", "dijkstra", "--aggregate",
        ])
        assert code == 0
        rows = read_rows(out)
        assert rows[0] == list(cli.CSV_HEADER)
        assert len(rows) == 1 + 10  # 50..140 step 10
        assert [r[1] for r in rows[1:]] == [str(u) for u in range(50, 141, 10)]
        assert all(r[0] == "users" for r in rows[1:])
        assert all(r[8] != "" for r in rows[1:])  # augmentations for mmec

    def test_hetero_storage_preset(self, tmp_path):
        out = tmp_path / "hs.csv"
        code = cli.main([
            "sweep", "--preset", "hetero-storage", "--trials", "3",
            "--algos", "mmec,rors", "--out", str(out),
            "--pathfinder", "dijkstra", "--aggregate",
            *SMALL[:-2],  # small base, drop --seed (sweep derives trial seeds)
        ])
        assert code == 0
        rows = read_rows(out)[1:]
        assert len(rows) == 2 * 3 * 2
        assert {r[1] for r in rows} == {"uniform", "random"}

    def test_placement_preset_and_dominance(self, tmp_path):
        out = tmp_path / "placement.csv"
        code = cli.main([
            "sweep", "--preset", "placement", "--trials", "2",
            "--algos", "mmec,rors,roos,sao", "--out", str(out),
            "--pathfinder", "dijkstra", "--aggregate", *SMALL[:-2],
        ])
        assert code == 0
        rows = read_rows(out)[1:]
        assert len(rows) == 3 * 2 * 4
        for r in rows:
            assert Fraction(r[4]) == Fraction(r[5]) + Fraction(r[6])
        by_point = {}
        for r in rows:
            by_point.setdefault((r[1], r[2]), {})[r[3]] = Fraction(r[4])
        for algos in by_point.values():
            assert len(algos) == 4
            assert algos["mmec"] <= min(algos.values())
            assert algos["roos"] <= algos["rors"]

    def test_determinism_modulo_runtime(self, tmp_path):
        args = ["sweep", "--preset", "capacity", "--trials", "2",
                "--algos", "mmec,roos", "--pathfinder", "dijkstra",
                "--aggregate", *SMALL[:-2]]
        out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
        assert cli.main([*args, "--out", str(out1)]) == 0
        assert cli.main([*args, "--out", str(out2)]) == 0
        strip = lambda rows: [r[:7] + r[8:] for r in rows]  # drop runtime_ms
        assert strip(read_rows(out1)) == strip(read_rows(out2))

    def test_jobs_parallel_matches_serial(self, tmp_path):
        args = ["sweep", "--preset", "hetero-capacity", "--trials", "2",
                "--algos", "roos", *SMALL[:-2]]
        serial, parallel = tmp_path / "s.csv", tmp_path / "p.csv"
        assert cli.main([*args, "--out", str(serial)]) == 0
        assert cli.main([*args, "--out", str(parallel), "--jobs", "2"]) == 0
        strip = lambda rows: [r[:7] + r[8:] for r in rows]
        assert strip(read_rows(serial)) == strip(read_rows(parallel))

    def test_unknown_preset_exits_1(self, tmp_path):
        assert cli.main(["sweep", "--preset", "nope",
                         "--out", str(tmp_path / "x.csv")]) == 1

    def test_unwritable_output_exits_1(self, tmp_path):
        assert cli.main([
            "sweep", "--preset", "capacity", "--trials", "1",
            "--algos", "roos", *SMALL[:-2],
            "--out", str(tmp_path / "missing-dir" / "x.csv"),
        ]) == 1

    def test_bad_algos_exits_1(self, tmp_path):
        assert cli.main(["sweep", "--preset", "users", "--algos", "mmec,warp",
                         "--out", str(tmp_path / "x.csv")]) == 1


class TestPresetPoints:
    def test_table_defaults_shapes(self):
        base = GenConfig()
        expectations = {
            "users": 10, "peers": 10, "videos": 9, "slots": 8,
            "storage": 9, "capacity": 5, "alpha": 10,
            "hetero-storage": 2, "hetero-capacity": 2, "placement": 3,
        }
        for preset, count in expectations.items():
            _, points = cli.preset_points(preset, base)
            assert len(points) == count

    def test_only_swept_parameter_changes(self):
        import dataclasses

        base = GenConfig()
        sweep_fields = {
            "users": {"users"},
            "videos": {"videos"},
            "slots": {"slots"},
            "storage": {"storage"},
            "capacity": {"capacity"},
            "alpha": {"alpha"},
            "peers": {"peers", "storage_total", "capacity_total"},
            "hetero-storage": {"storage_alloc"},
            "hetero-capacity": {"capacity_alloc"},
            "placement": {"placement"},
        }
        for preset, allowed in sweep_fields.items():
            _, points = cli.preset_points(preset, base)
            for _, cfg in points:
                for field in dataclasses.fields(GenConfig):
                    if field.name in allowed or field.name == "seed":
                        continue
                    assert getattr(cfg, field.name) == getattr(base, field.name), (
                        preset, field.name)

    def test_peers_preset_keeps_totals(self):
        base = GenConfig()
        _, points = cli.preset_points("peers", base)
        for label, cfg in points:
            s = scengen.generate(cfg)
            assert len(s.peers) == int(label)
            assert sum(len(p.storage) for p in s.peers) == 300
            assert sum(p.capacity for p in s.peers) == 100


class TestVerify:
    def test_all_match(self, capsys):
        assert cli.main(["verify", "--instances", "15", "--seed", "5"]) == 0
        assert "verified 15/15 instances optimal" in capsys.readouterr().out

    def test_zero_instances_vacuous_pass(self, capsys):
        assert cli.main(["verify", "--instances", "0"]) == 0
        assert "verified 0/0" in capsys.readouterr().out

    def test_corrupted_solver_detected(self, monkeypatch, capsys):
        def corrupted(scenario):
            _, cost = mmec.run(scenario)
            return cost.total + 1

        matches, total = cli.run_verify(8, 1, solve_cost=corrupted)
        assert matches == 0 and total == 8

        real_run = mmec.run

        def corrupted_run(scenario, **kwargs):
            schedule, cost = real_run(scenario, **kwargs)
            from pcdnsched.model import CostBreakdown

            bumped = CostBreakdown(cost.total + 1, cost.per_node,
                                   cost.peer_total + 1, cost.cdn_total)
            return schedule, bumped

        monkeypatch.setattr(cli.mmec, "run", corrupted_run)
        assert cli.main(["verify", "--instances", "5", "--seed", "2"]) == 2


def test_module_entry_point(tmp_path):
    result = subprocess.run(
        [sys.executable, "-m", "pcdnsched", "solve", *SMALL, "--algo", "roos"],
        capture_output=True, text=True, timeout=120,
    )
    assert result.returncode == 0
    assert result.stdout.startswith("algo=roos total=")


def test_help_exits_zero(capsys):
    assert cli.main(["--help"]) == 0
    assert cli.main(["sweep", "--help"]) == 0
