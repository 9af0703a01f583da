import json
import socket
import subprocess
import sys
import time
import urllib.request
from pathlib import Path

import pytest

from convobot.cli import main
from convobot.data import sample_kb_path

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="module")
def trained(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli_models")
    intent_path = root / "intent.json"
    ner_path = root / "ner.json"
    assert main(["train-intent", "--kb", sample_kb_path(), "--out", str(intent_path), "--seed", "0"]) == 0
    assert main(["train-ner", "--kb", sample_kb_path(), "--out", str(ner_path), "--seed", "0"]) == 0
    return intent_path, ner_path


def run_cli(args, stdin_text=None):
    return subprocess.run(
        [sys.executable, "-m", "convobot.cli", *args],
        input=stdin_text,
        capture_output=True,
        text=True,
        timeout=180,
    )


class TestHelpAndUsage:
    @pytest.mark.parametrize(
        "cmd",
        ["train-intent", "train-ner", "eval-ner", "chat", "serve", "validate-kb"],
    )
    def test_help_exits_zero(self, cmd, capsys):
        with pytest.raises(SystemExit) as exit_info:
            main([cmd, "--help"])
        assert exit_info.value.code == 0

    def test_no_command_is_usage_error(self):
        assert main([]) == 1

    def test_unknown_flag_is_usage_error(self):
        assert main(["validate-kb", "--kb", "x", "--bogus"]) == 1

    def test_unknown_command_is_usage_error(self):
        assert main(["frobnicate"]) == 1


class TestValidateKb:
    def test_sample_kb_ok(self, capsys):
        assert main(["validate-kb", "--kb", sample_kb_path()]) == 0
        assert "knowledge base OK" in capsys.readouterr().out

    def test_missing_file(self):
        assert main(["validate-kb", "--kb", "/no/such/file.json"]) == 2

    def test_malformed_json_position(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text('{"input": [,]}')
        assert main(["validate-kb", "--kb", str(path)]) == 2
        assert "line 1" in capsys.readouterr().err

    def test_missing_response_set_named(self, tmp_path, capsys):
        doc = {
            "input": [
                {"message": "m1", "intent": "request_rate", "entities": []},
                {"message": "m2", "intent": "request_rate", "entities": []},
                {"message": "m3", "intent": "other", "entities": []},
                {"message": "m4", "intent": "other", "entities": []},
            ],
            "response": [{"intent": "other", "templates": ["ok"]}],
            "ne_values": {},
        }
        path = tmp_path / "kb.json"
        path.write_text(json.dumps(doc))
        assert main(["validate-kb", "--kb", str(path)]) == 2
        assert "request_rate" in capsys.readouterr().err


class TestTrainIntent:
    def test_prints_accuracies(self, capsys, tmp_path):
        out = tmp_path / "m.json"
        code = main(
            ["train-intent", "--kb", sample_kb_path(), "--out", str(out), "--seed", "0"]
        )
        assert code == 0
        printed = capsys.readouterr().out
        assert "train accuracy: " in printed
        assert "test accuracy: 0.9" in printed
        assert out.exists()

    def test_missing_kb(self, tmp_path):
        assert main(["train-intent", "--kb", "/nope.json", "--out", str(tmp_path / "m")]) == 2


class TestTrainNer:
    def test_conll_files(self, capsys, tmp_path):
        out = tmp_path / "ner.json"
        code = main(
            [
                "train-ner",
                "--train", str(DATA / "tiny_train.conll"),
                "--valid", str(DATA / "tiny_valid.conll"),
                "--out", str(out),
                "--seed", "0",
            ]
        )
        assert code == 0
        printed = capsys.readouterr().out
        assert "validation accuracy" in printed
        assert out.exists()

    def test_kb_and_conll_mutually_exclusive(self):
        assert (
            main(
                ["train-ner", "--kb", "x", "--train", "y", "--valid", "z", "--out", "o"]
            )
            == 1
        )
        assert main(["train-ner", "--out", "o"]) == 1

    def test_train_without_valid_is_usage_error(self):
        assert main(["train-ner", "--train", "x", "--out", "o"]) == 1


@pytest.fixture(scope="module")
def conll_model(tmp_path_factory):
    path = tmp_path_factory.mktemp("eval") / "ner.json"
    main(
        [
            "train-ner",
            "--train", str(DATA / "tiny_train.conll"),
            "--valid", str(DATA / "tiny_valid.conll"),
            "--out", str(path),
            "--seed", "0",
        ]
    )
    return path


class TestEvalNer:
    def test_text_report(self, conll_model, capsys):
        code = main(
            ["eval-ner", "--model", str(conll_model), "--test", str(DATA / "tiny_test.conll")]
        )
        assert code == 0
        out = capsys.readouterr().out
        assert "weighted avg" in out and "confusion matrix" in out

    def test_json_report_parses(self, conll_model, capsys):
        code = main(
            [
                "eval-ner",
                "--model", str(conll_model),
                "--test", str(DATA / "tiny_test.conll"),
                "--format", "json",
            ]
        )
        assert code == 0
        doc = json.loads(capsys.readouterr().out)
        assert set(doc) >= {"labels", "per_class", "weighted", "confusion", "accuracy"}

    def test_corrupt_model_is_data_error(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{}")
        assert main(["eval-ner", "--model", str(bad), "--test", str(DATA / "tiny_test.conll")]) == 2


class TestChat:
    def test_scripted_transcript_deterministic(self, trained):
        intent_path, ner_path = trained
        script = "How are you?\nWhat is the taxi rate in Islamabad?\nThank you\n"
        args = [
            "chat",
            "--kb", sample_kb_path(),
            "--intent-model", str(intent_path),
            "--ner-model", str(ner_path),
            "--seed", "0",
        ]
        first = run_cli(args, script)
        second = run_cli(args, script)
        assert first.returncode == 0 and second.returncode == 0
        assert first.stdout == second.stdout
        assert first.stdout.count("bot> ") == 3

    def test_islamabad_reply_contains_rates(self, trained):
        intent_path, ner_path = trained
        result = run_cli(
            [
                "chat",
                "--kb", sample_kb_path(),
                "--intent-model", str(intent_path),
                "--ner-model", str(ner_path),
                "--seed", "0",
            ],
            "What is the taxi rate in Islamabad?\n",
        )
        assert result.returncode == 0
        assert "20 Rs./km" in result.stdout
        assert "islamabad/LOC" in result.stdout
        assert "taxi/MISC" in result.stdout

    def test_eof_immediately_exits_clean(self, trained):
        intent_path, ner_path = trained
        result = run_cli(
            [
                "chat",
                "--kb", sample_kb_path(),
                "--intent-model", str(intent_path),
                "--ner-model", str(ner_path),
                "--seed", "0",
            ],
            "",
        )
        assert result.returncode == 0

    def test_load_failure_before_prompt(self, trained):
        _, ner_path = trained
        result = run_cli(
            [
                "chat",
                "--kb", sample_kb_path(),
                "--intent-model", "/no/model.json",
                "--ner-model", str(ner_path),
            ],
            "hello\n",
        )
        assert result.returncode == 2
        assert "bot>" not in result.stdout


def free_port():
    probe = socket.socket()
    probe.bind(("127.0.0.1", 0))
    port = probe.getsockname()[1]
    probe.close()
    return port


class TestServe:
    def test_health_then_shutdown(self, trained, tmp_path):
        intent_path, ner_path = trained
        port = free_port()
        config = {
            "kb_path": sample_kb_path(),
            "intent_model_path": str(intent_path),
            "ner_model_path": str(ner_path),
            "host": "127.0.0.1",
            "port": port,
            "seed": 5,
        }
        config_path = tmp_path / "config.json"
        config_path.write_text(json.dumps(config))
        proc = subprocess.Popen(
            [sys.executable, "-m", "convobot.cli", "serve", "--config", str(config_path)],
            stdout=subprocess.PIPE,
            stderr=subprocess.STDOUT,
            text=True,
        )
        try:
            deadline = time.time() + 30
            body = None
            while time.time() < deadline:
                try:
                    with urllib.request.urlopen(
                        f"http://127.0.0.1:{port}/api/health", timeout=1
                    ) as response:
                        body = json.loads(response.read())
                        break
                except Exception:
                    time.sleep(0.2)
            assert body is not None, "service never came up"
            assert body["status"] == "ok"
        finally:
            proc.terminate()
            proc.wait(timeout=15)

    def test_occupied_port_fails(self, trained, tmp_path):
        intent_path, ner_path = trained
        blocker = socket.socket()
        blocker.bind(("127.0.0.1", 0))
        port = blocker.getsockname()[1]
        config_path = tmp_path / "config.json"
        config_path.write_text(
            json.dumps(
                {
                    "kb_path": sample_kb_path(),
                    "intent_model_path": str(intent_path),
                    "ner_model_path": str(ner_path),
                    "port": port,
                }
            )
        )
        try:
            result = run_cli(["serve", "--config", str(config_path)])
            assert result.returncode == 3
            assert "cannot bind" in result.stderr
        finally:
            blocker.close()

    def test_bad_config_is_data_error(self, tmp_path):
        config_path = tmp_path / "config.json"
        config_path.write_text("{nope")
        assert main(["serve", "--config", str(config_path)]) == 2
