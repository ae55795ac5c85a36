"""Unit tests for the command-line interface."""

from collections.abc import Callable
from pathlib import Path

import pytest

from entrypoints.cli import (
    EXIT_CONFIG,
    EXIT_FAULT,
    EXIT_OK,
    main,
    overall_status,
    parse_model,
    parse_window,
)
from simulation.errors import ConfigurationError
from simulation.sensor import load_table

WriteScenario = Callable[[str, str], Path]

OBSTACLE = "\n[[obstacle]]\nx = 0.6\ny = 0.0\nradius = 0.2\n"


def test_parse_window_exemplos() -> None:
    """
    Test the START:END window syntax.

    Asserts:
        - '100:200' parses to (100, 200)
        - Malformed text raises ConfigurationError naming vcd_window
    """
    assert parse_window("100:200") == (100, 200)
    for text in ("100", "a:b", "1:2:3"):
        with pytest.raises(ConfigurationError, match="vcd_window"):
            parse_window(text)


def test_parse_model_exemplos() -> None:
    """
    Test the alpha,beta model syntax.

    Asserts:
        - The default text gives the default model
        - A single number is rejected
    """
    model = parse_model("27.0,0.42")
    assert (model.alpha, model.beta) == (27.0, 0.42)
    with pytest.raises(ConfigurationError, match="model"):
        parse_model("27.0")


def test_overall_status() -> None:
    """
    Test the aggregated exit status.

    Asserts:
        - Configuration errors win over faults, faults over clean runs
    """
    assert overall_status([EXIT_OK, EXIT_OK]) == EXIT_OK
    assert overall_status([EXIT_OK, EXIT_FAULT]) == EXIT_FAULT
    assert overall_status([EXIT_FAULT, EXIT_CONFIG]) == EXIT_CONFIG


def test_run_cria_arquivos(
    write_scenario: WriteScenario,
    fast_toml: str,
    tmp_path: Path,
    capsys: pytest.CaptureFixture[str],
) -> None:
    """
    Test a clean single run.

    Asserts:
        - Exit status 0 and the summary line on stdout
        - Trace, waveform and summary are written directly into --out
    """
    path = write_scenario("near", fast_toml.format(duration=0.2) + OBSTACLE)
    out = tmp_path / "out"

    status = main(["run", str(path), "--out", str(out), "--vcd-window", "0:500"])

    assert status == EXIT_OK
    assert "✓ near:" in capsys.readouterr().out
    for name in ("trace.csv", "waveform.vcd", "run_summary.json"):
        assert (out / name).exists()


def test_run_erro_de_configuracao(
    write_scenario: WriteScenario, tmp_path: Path, capsys: pytest.CaptureFixture[str]
) -> None:
    """
    Test a scenario with d_stop above d_far.

    Asserts:
        - Exit status 1 with an error on stderr naming d_stop
        - Nothing is written
    """
    path = write_scenario("bad", "[control]\nd_stop = 70.0\nd_far = 60.0\n")
    out = tmp_path / "out"

    status = main(["run", str(path), "--out", str(out)])

    assert status == EXIT_CONFIG
    assert "d_stop" in capsys.readouterr().err
    assert not out.exists()


def test_run_janela_invalida(
    write_scenario: WriteScenario, fast_toml: str, tmp_path: Path
) -> None:
    """
    Test command-line window errors.

    Asserts:
        - A malformed window and one beyond the run both exit with 1
    """
    path = write_scenario("fast", fast_toml.format(duration=0.1))
    out = str(tmp_path / "out")
    assert main(["run", str(path), "--out", out, "--vcd-window", "5"]) == EXIT_CONFIG
    assert (
        main(["run", str(path), "--out", out, "--vcd-window", "0:999999"])
        == EXIT_CONFIG
    )


def test_run_arquivo_inexistente(tmp_path: Path) -> None:
    """
    Test a missing scenario file.

    Asserts:
        - Exit status 1
    """
    assert main(["run", str(tmp_path / "nope.toml")]) == EXIT_CONFIG


def test_run_adc_desconectado(
    write_scenario: WriteScenario,
    fast_toml: str,
    tmp_path: Path,
    capsys: pytest.CaptureFixture[str],
) -> None:
    """
    Test a run whose ADC never answers.

    Asserts:
        - Exit status 2 and the fault is reported
        - The trace files are still written
    """
    text = fast_toml.format(duration=0.05).replace(
        "conversion_ticks = 50", "conversion_ticks = 50\nattached = false"
    )
    path = write_scenario("detached", text)
    out = tmp_path / "out"

    assert main(["run", str(path), "--out", str(out)]) == EXIT_FAULT
    assert "ADC fault" in capsys.readouterr().out
    assert (out / "run_summary.json").exists()


def test_run_deterministico(
    write_scenario: WriteScenario, fast_toml: str, tmp_path: Path
) -> None:
    """
    Test byte-identical outputs of repeated runs.

    Asserts:
        - Every file of two runs of the same scenario is identical
    """
    path = write_scenario("repeat", fast_toml.format(duration=0.3) + OBSTACLE)
    first, second = tmp_path / "first", tmp_path / "second"
    assert main(["run", str(path), "--out", str(first)]) == EXIT_OK
    assert main(["run", str(path), "--out", str(second)]) == EXIT_OK

    names = sorted(p.name for p in first.iterdir())
    assert names == sorted(p.name for p in second.iterdir())
    for name in names:
        assert (first / name).read_bytes() == (second / name).read_bytes(), name


def test_run_varios_cenarios(
    write_scenario: WriteScenario, fast_toml: str, tmp_path: Path
) -> None:
    """
    Test several scenarios in one invocation.

    Asserts:
        - Each scenario writes into its own subdirectory
        - Duplicate scenario file names are rejected
    """
    a = write_scenario("alpha", fast_toml.format(duration=0.05))
    b = write_scenario("beta", fast_toml.format(duration=0.05) + OBSTACLE)
    out = tmp_path / "out"

    assert main(["run", str(a), str(b), "--out", str(out), "--jobs", "1"]) == EXIT_OK
    assert (out / "alpha" / "trace.csv").exists()
    assert (out / "beta" / "trace.csv").exists()

    assert main(["run", str(a), str(a), "--out", str(out)]) == EXIT_CONFIG


def test_calibrate_cria_tabela(
    tmp_path: Path, capsys: pytest.CaptureFixture[str]
) -> None:
    """
    Test the calibrate subcommand.

    Asserts:
        - A 2-point table holds the codes of both range ends
        - The table path is printed
        - A malformed model exits with 1
    """
    path = tmp_path / "two.csv"
    assert main(["calibrate", "--points", "2", "--out", str(path)]) == EXIT_OK
    assert str(path) in capsys.readouterr().out
    assert load_table(path).codes == (17, 132)

    bad = ["calibrate", "--model", "x", "--out", str(tmp_path / "bad.csv")]
    assert main(bad) == EXIT_CONFIG


def test_argumentos_invalidos() -> None:
    """
    Test usage errors.

    Asserts:
        - A missing subcommand exits with status 1
    """
    with pytest.raises(SystemExit) as excinfo:
        main([])
    assert excinfo.value.code == EXIT_CONFIG
