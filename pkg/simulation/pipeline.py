"""End-to-end execution of one scenario: table, wiring, run and traces."""

import json
import logging
from pathlib import Path

from simulation.config import RunConfig
from simulation.controller import RobotSystem, RunResult, resolve_table
from simulation.sensor import CalibrationTable
from traces.csv_trace import CsvTraceRecorder
from traces.plot_data import write_plot_data
from traces.vcd_trace import VcdRecorder, robot_signals

logger = logging.getLogger(__name__)

ORDER_CSV = 80
ORDER_VCD = 90

TRACE_FILE = "trace.csv"
WAVEFORM_FILE = "waveform.vcd"
SUMMARY_FILE = "run_summary.json"


class SimulationPipeline:
    """
    Runs one configured scenario and writes every output file.

    Attributes:
        config: Run configuration.
        verbose: Print the step banners.
    """

    def __init__(self, config: RunConfig, verbose: bool = True) -> None:
        """
        Initialize the pipeline.

        Args:
            config: Run configuration; ``out_dir`` receives the files.
            verbose: Print progress banners.
        """
        self.config = config
        self.verbose = verbose

    def _print(self, message: str) -> None:
        if self.verbose:
            print(message)

    def load_table(self) -> CalibrationTable:
        """
        Load the configured calibration table or build one from the model.

        Raises:
            FileNotFoundError: If the configured table file does not exist.
            CalibrationError: If the table is invalid.
        """
        return resolve_table(self.config)

    def save_summary(self, result: RunResult, filepath: Path) -> Path:
        """Write the run summary as JSON (no timestamps, stable key order)."""
        filepath.parent.mkdir(parents=True, exist_ok=True)
        with filepath.open("w", newline="\n") as f:
            json.dump(result.to_dict(), f, indent=2)
            f.write("\n")
        return filepath

    def run(self) -> RunResult:
        """
        Execute the scenario.

        Returns:
            Run summary with the names of the written files.

        Raises:
            FileNotFoundError: If the calibration table file is missing.
            CalibrationError: If the calibration table is invalid.
        """
        config = self.config
        out_dir = Path(config.out_dir)

        self._print("=" * 60)
        self._print(f"Iniciando simulação: {config.scenario.name}")
        self._print("=" * 60)

        self._print("\n[1/4] Preparando tabela de calibração...")
        table = self.load_table()
        source = config.table_path if config.table_path is not None else "modelo"
        self._print(f"✓ Tabela com {len(table.codes)} entradas ({source})")

        self._print("\n[2/4] Montando o sistema...")
        system = RobotSystem(config, table)
        csv = CsvTraceRecorder(system, config.csv_decimation)
        system.attach(csv, ORDER_CSV)
        vcd = None
        if config.vcd_enabled:
            vcd = VcdRecorder(
                robot_signals(system),
                config.effective_vcd_window,
                config.clock.controller_period_ns,
                out_dir / WAVEFORM_FILE,
            )
            system.attach(vcd, ORDER_VCD)
        self._print(f"✓ {len(system.simulator.handles)} componentes registrados")

        self._print(f"\n[3/4] Simulando {config.scenario.duration_s:g} s...")
        result = system.run()
        self._print(
            f"✓ {result.ticks} ciclos, {result.samples} amostras, "
            f"distância final {result.final_distance_cm:.2f} cm"
        )
        if result.fault:
            self._print("✗ Falha na aquisição do ADC (timeout de EOC)")

        self._print("\n[4/4] Salvando traços...")
        files: dict[str, Path] = {TRACE_FILE: csv.write(out_dir / TRACE_FILE)}
        if vcd is not None:
            files[WAVEFORM_FILE] = vcd.close()
        files.update(write_plot_data(csv.to_frame(), config.sensor, table, out_dir))
        result.files = {name: path.name for name, path in files.items()}
        result.files[SUMMARY_FILE] = SUMMARY_FILE
        self.save_summary(result, out_dir / SUMMARY_FILE)
        self._print(f"✓ {len(result.files)} arquivos em {out_dir}")

        self._print("\n" + "=" * 60)
        self._print("Simulação concluída!")
        self._print("=" * 60)
        return result
