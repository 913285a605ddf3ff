#!/usr/bin/env python3
"""
End-to-end tests of the fairsamp command line: every subcommand run through the same
parser and handler registry as the console script, with output directories in temp space.
"""

import json
import os
import sys
import tempfile
from pathlib import Path

# Add the project root to Python path
sys.path.insert(0, str(Path(__file__).parent))

from fairsamp.core.config import WorkbenchSettings, get_settings, reset_settings
from fairsamp.core.errors import ConfigurationError, ExperimentError
from fairsamp.core.models import CommandResult
from fairsamp.core.state import ResultWriter
from fairsamp.main import build_parser, main
from fairsamp.workbench import discover_handlers

FAST = ['--ni', '200', '--fairness-cap', '4096']


def _run(argv) -> CommandResult:
    """Parse argv like the console script and return the handler's result."""
    handlers = discover_handlers()
    args = build_parser(handlers).parse_args(argv)
    return handlers[args.command].run(args, get_settings({'seed': 0}))


def test_handler_discovery():
    print("🧪 Testing handler discovery...")

    handlers = discover_handlers()
    assert sorted(handlers) == ['anneal', 'build', 'compile', 'gridsearch', 'metrics', 'problems', 'run', 'simulate']
    for name, handler in handlers.items():
        assert handler.get_capabilities()['name'] == name
        assert handler.description

    print("✅ Handler discovery test passed")


def test_problems_command():
    print("🧪 Testing problems command...")

    result = _run(['problems'])
    assert result.success
    assert len(result.artifacts_created['b']['ground_states']) == 12
    assert result.artifacts_created['c']['topologies'] == ['6A', '7H', 'Clique']
    assert _run(['problems', '--problem', 'e']).artifacts_created.keys() == {'e'}
    assert main(['problems']) == 0

    print("✅ problems command test passed")


def test_gridsearch_command():
    print("🧪 Testing gridsearch command...")

    with tempfile.TemporaryDirectory() as tmpdir:
        result = _run(['gridsearch', '--problem', 'a', '--out', tmpdir])
        assert result.success
        assert abs(result.artifacts_created['energy'] - (-2.682)) <= 1e-3
        assert abs(result.artifacts_created['gsp'] - 0.498) <= 1e-3
        saved = json.loads((Path(tmpdir) / 'gridsearch.json').read_text())
        assert saved['evaluations'] == 120 ** 2

    refused = _run(['gridsearch', '--problem', 'e', '--p', '2'])
    assert not refused.success
    assert 'budget' in refused.content

    print("✅ gridsearch command test passed")


def test_build_then_compile():
    print("🧪 Testing build and compile...")

    with tempfile.TemporaryDirectory() as tmpdir:
        built = _run(['build', '--problem', 'c', '--out', tmpdir])
        assert built.success
        circuit_file = Path(tmpdir) / 'circuit.txt'
        assert circuit_file.read_text().startswith('# qubits: 5\n')

        compiled_dir = Path(tmpdir) / 'compiled'
        result = _run(['compile', '--circuit', str(circuit_file), '--topology', '6A', '--verify',
                       '--out', str(compiled_dir)])
        assert result.success, result.content
        assert result.artifacts_created['equivalent'] is True
        assert result.artifacts_created['swap_count'] >= 1
        assert any('equivalent' in line and line.endswith('true') for line in result.content.splitlines())
        report = json.loads((compiled_dir / 'compile.json').read_text())
        assert report['topology'] == '6A'
        assert (compiled_dir / 'circuit.txt').read_text().startswith('# qubits: 6\n# gateset: ibm\n')

    printed = _run(['build', '--problem', 'e', '--no-measure'])
    assert printed.success and 'MEASURE' not in printed.content

    print("✅ build and compile test passed")


def test_compile_rejects_unadmitted_topology():
    print("🧪 Testing topology admission on compile...")

    result = _run(['compile', '--problem', 'a', '--topology', '6A'])
    assert not result.success
    assert result.status_update == 'ExperimentError'
    assert main(['compile', '--problem', 'a', '--topology', '6A']) == 1

    print("✅ Topology admission test passed")


def test_run_is_reproducible():
    """Two runs with one seed write byte-identical result files."""
    print("🧪 Testing reproducible runs...")

    argv = ['run', '--problem', 'e', '--repeats', '3', '--shots', '1024', '--seed', '11'] + FAST
    with tempfile.TemporaryDirectory() as tmpdir:
        first, second = Path(tmpdir) / 'first', Path(tmpdir) / 'second'
        assert main(argv + ['--out', str(first)]) == 0
        assert main(argv + ['--out', str(second)]) == 0
        for name in ('summary.json', 'calls.csv', 'circuit.txt'):
            assert (first / name).read_bytes() == (second / name).read_bytes(), name

        summary = json.loads((first / 'summary.json').read_text())
        assert summary['angle_source'] == 'reference'
        assert summary['repeats'] == 3 and len(summary['fairness_shots']) == 3
        assert summary['gsp']['min'] >= 0.99
        assert summary['ground_states'] == ['01', '10', '11']
        lines = (first / 'calls.csv').read_text().splitlines()
        assert lines[0] == 'call,seed,gsp,fairness_shots,energy'
        assert len(lines) == 4

    print("✅ Reproducible runs test passed")


def test_run_on_topology_and_unreduced():
    print("🧪 Testing compiled and unreduced runs...")

    compiled = _run(['run', '--problem', 'e', '--topology', 'LNN', '--repeats', '2', '--shots', '2048'] + FAST)
    assert compiled.success, compiled.content
    assert 'compile' in compiled.artifacts_created
    assert compiled.artifacts_created['gsp']['min'] >= 0.99

    full = _run(['run', '--problem', 'd', '--no-reduce', '--beta', '1.5', '--gamma', '0.5',
                 '--repeats', '2', '--shots', '1024'] + FAST)
    assert full.success, full.content
    summary = full.artifacts_created
    assert summary['angle_source'] == 'explicit'
    assert len(summary['ground_states']) == 6
    assert 'gsp_combined' in summary and len(summary['fairness_shots_combined']) == 2

    print("✅ Compiled and unreduced runs test passed")


def test_failed_run_writes_nothing():
    print("🧪 Testing failed runs leave no files...")

    with tempfile.TemporaryDirectory() as tmpdir:
        out = Path(tmpdir) / 'results'
        assert main(['run', '--problem', 'a', '--topology', '6A', '--repeats', '1', '--out', str(out)] + FAST) == 1
        assert not out.exists()

        writer = ResultWriter(out)
        writer.stage('a.txt', 'x\n')
        try:
            writer.stage('../escape.txt', 'x\n')
            assert False, "Should have raised ExperimentError"
        except ExperimentError:
            pass
        assert not out.exists()
        writer.commit()
        assert sorted(p.name for p in out.iterdir()) == ['a.txt']

    print("✅ Failed runs test passed")


def test_simulate_then_metrics():
    print("🧪 Testing simulate and metrics...")

    with tempfile.TemporaryDirectory() as tmpdir:
        simulated = _run(['simulate', '--problem', 'e', '--shots', '2048', '--seed', '4', '--out', tmpdir])
        assert simulated.success
        assert simulated.artifacts_created['shots'] == 2048

        for name in ('counts.json', 'counts.csv'):
            scored = _run(['metrics', '--counts', str(Path(tmpdir) / name), '--problem', 'e'] + FAST)
            assert scored.success, scored.content
            assert scored.artifacts_created['shots'] == 2048
            assert scored.artifacts_created['gsp'] == simulated.artifacts_created['gsp']

        both = _run(['metrics', '--counts', str(Path(tmpdir) / 'counts.json'), '--ground', '01', '10',
                     '--mode', 'both'] + FAST)
        assert both.success, both.content
        # 01 and 10 are one complementary pair, leaving combined fairness undefined
        assert both.artifacts_created['ground counts (combined)'].keys() == {'01'}
        assert both.artifacts_created['fairness shots (combined)'] == 'nan'
        assert both.artifacts_created['gsp (combined)'] == both.artifacts_created['gsp (separate)']

        reduced = _run(['metrics', '--counts', str(Path(tmpdir) / 'counts.json'), '--problem', 'e',
                        '--mode', 'both'] + FAST)
        assert reduced.success, reduced.content
        report = reduced.artifacts_created
        assert report['gsp (combined)'] == report['gsp (separate)'] == simulated.artifacts_created['gsp']
        assert report['ground counts (combined)'] == report['ground counts (separate)']

        missing = _run(['metrics', '--counts', str(Path(tmpdir) / 'counts.json')])
        assert not missing.success

    print("✅ simulate and metrics test passed")


def test_metrics_aggregate_error():
    print("🧪 Testing aggregate error from files...")

    with tempfile.TemporaryDirectory() as tmpdir:
        assert _run(['compile', '--problem', 'e', '--topology', 'LNN', '--out', tmpdir]).success
        calib = Path(tmpdir) / 'calib.json'
        calib.write_text(json.dumps({'defaults': {'single': 0.0, 'two': 0.0, 'readout': 0.0}}))
        result = _run(['metrics', '--circuit', str(Path(tmpdir) / 'circuit.txt'), '--calib', str(calib)])
        assert result.success, result.content
        assert result.artifacts_created['aggregate error'] == 0.0

        noisy = Path(tmpdir) / 'noisy.json'
        noisy.write_text(json.dumps({'defaults': {'single_fidelity': 1.0, 'two_fidelity': 0.99, 'readout': 0.0}}))
        result = _run(['metrics', '--circuit', str(Path(tmpdir) / 'circuit.txt'), '--calib', str(noisy)])
        assert 0.0 < result.artifacts_created['aggregate error'] < 1.0

    print("✅ Aggregate error test passed")


def test_anneal_command():
    print("🧪 Testing anneal command...")

    with tempfile.TemporaryDirectory() as tmpdir:
        result = _run(['anneal', '--problem', 'e', '--reduce', '--times', '0', '5', '--shots', '1024',
                       '--out', tmpdir] + FAST)
        assert result.success, result.content
        lines = (Path(tmpdir) / 'anneal.csv').read_text().splitlines()
        assert lines[0] == 'time,gsp,fairness_shots,energy'
        assert len(lines) == 3

        full = _run(['anneal', '--problem', 'e', '--times', '1', '--shots', '512'] + FAST)
        assert full.artifacts_created['csv'].startswith(
            'time,gsp,fairness_shots,energy,gsp_combined,fairness_shots_combined\n')

    print("✅ anneal command test passed")


def test_settings_from_environment():
    print("🧪 Testing settings from the environment...")

    keys = ['FAIRSAMP_SHOTS', 'FAIRSAMP_FAIRNESS_CAP', 'FAIRSAMP_REPEATS', 'FAIRSAMP_SEED', 'FAIRSAMP_LOG_LEVEL']
    saved = {k: os.environ.get(k) for k in keys}
    try:
        defaults = WorkbenchSettings()
        assert (defaults.shots, defaults.repeats, defaults.ni_gate, defaults.ni_anneal) == (8192, 20, 100_000, 1000)
        assert defaults.grid_steps == 60 and defaults.log_level == 'WARNING'

        os.environ['FAIRSAMP_SHOTS'] = '100'
        os.environ['FAIRSAMP_FAIRNESS_CAP'] = '1e7'
        os.environ['FAIRSAMP_LOG_LEVEL'] = 'info'
        settings = WorkbenchSettings.from_env()
        assert settings.shots == 100
        assert settings.fairness_cap == 10_000_000
        assert settings.log_level == 'INFO'
        assert WorkbenchSettings.from_env({'shots': 7}).shots == 7

        for key, bad in (('FAIRSAMP_REPEATS', 'abc'), ('FAIRSAMP_SEED', '-1'), ('FAIRSAMP_LOG_LEVEL', 'LOUD')):
            os.environ[key] = bad
            try:
                WorkbenchSettings.from_env()
                assert False, f"Should have rejected {key}={bad}"
            except ConfigurationError:
                pass
            reset_settings()
            assert main(['problems']) == 1
            del os.environ[key]
    finally:
        for key, value in saved.items():
            if value is None:
                os.environ.pop(key, None)
            else:
                os.environ[key] = value
        reset_settings()

    print("✅ Settings from the environment test passed")


def main_tests():
    """Run all end-to-end tests."""
    print("🚀 Starting fairsamp end-to-end tests...\n")

    try:
        test_handler_discovery()
        test_problems_command()
        test_gridsearch_command()
        test_build_then_compile()
        test_compile_rejects_unadmitted_topology()
        test_run_is_reproducible()
        test_run_on_topology_and_unreduced()
        test_failed_run_writes_nothing()
        test_simulate_then_metrics()
        test_metrics_aggregate_error()
        test_anneal_command()
        test_settings_from_environment()

        print("\n🎉 All end-to-end tests passed!")
        return 0

    except Exception as e:
        print(f"\n❌ Test failed: {e}")
        import traceback
        traceback.print_exc()
        return 1


if __name__ == "__main__":
    sys.exit(main_tests())
