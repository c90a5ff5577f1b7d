# SPDX-FileCopyrightText: 2024 Espressif Systems (Shanghai) CO LTD
# SPDX-License-Identifier: Apache-2.0
import json
import os

import pytest
from conftest import (
    CORPUS_DIR,
)

from csr_prover.constants import (
    ExitCode,
)
from csr_prover.main import (
    main,
)
from csr_prover.trs import (
    load_spec,
)


def _trs(name):
    return os.path.join(CORPUS_DIR, f'{name}.trs')


def _cert(name):
    return os.path.join(CORPUS_DIR, f'{name}.cert')


def run(*argv):
    with pytest.raises(SystemExit) as e:
        main(list(argv))

    return e.value.code


@pytest.fixture(autouse=True)
def in_tmp_path(tmp_path, monkeypatch):
    # no config file is picked up from the working directory
    (tmp_path / '.git').mkdir()
    monkeypatch.chdir(tmp_path)


def test_prove_productivity(capsys):
    assert run('prove-productivity', _trs('zip_alt_p'), '--cert', _cert('zip_alt_p')) == ExitCode.YES
    out = capsys.readouterr().out
    assert out.startswith('Productive: Yes\n')
    assert 'reason: given certificate' in out


def test_prove_productivity_comparison_mode(capsys):
    assert run('prove-productivity', _trs('zip_alt_p'), '--mode', 'zr10') == ExitCode.UNKNOWN
    out = capsys.readouterr().out
    assert out.startswith('ConstructorNormalizing: Unknown\n')
    assert 'route: zr10' in out


def test_prove_productivity_via_shallowing(capsys):
    assert run('prove-productivity', _trs('ex5_3'), '--cert', _cert('ex5_3_shallow')) == ExitCode.YES
    assert 'route: shallowing' in capsys.readouterr().out

    assert run('prove-productivity', _trs('ex5_3'), '--no-transform') == ExitCode.UNKNOWN
    assert 'transform-shallow' in capsys.readouterr().out


def test_prove_termination(capsys):
    assert run('prove-termination', _trs('ex5_3'), '--map', 'canonical') == ExitCode.NO
    out = capsys.readouterr().out
    assert 'result: Nonterminating' in out
    assert 'loop from s:' in out

    assert run('prove-termination', _trs('ordinals'), '--cert', _cert('ordinals')) == ExitCode.YES


def test_analyze(capsys):
    assert run('analyze', _trs('wallis')) == ExitCode.NO
    assert run('analyze', _trs('ordinals')) == ExitCode.YES
    capsys.readouterr()


def test_canonical(capsys):
    assert run('canonical', _trs('ordinals')) == ExitCode.YES
    out = capsys.readouterr().out
    assert 'μcan(+) = {2}' in out
    assert 'μ_Δ(S) = {1}' in out
    assert 'STRATEGY map in CM_R: yes' in out


def test_normalize(capsys):
    assert run('normalize', _trs('ordinals'), '--term', '+(S(0),S(0))') == ExitCode.YES
    assert capsys.readouterr().out.splitlines()[-1].endswith(': S(S(0))')

    assert run('normalize', _trs('wallis'), '--term', 'evenNs', '--map', 'top', '--fuel', '3') == ExitCode.UNKNOWN
    assert 'FuelExhausted after 3 steps' in capsys.readouterr().out


def test_transform_shallow(tmp_path, capsys):
    out_fp = str(tmp_path / 'shallow.trs')
    assert run('transform-shallow', _trs('ex5_3'), '-o', out_fp) == ExitCode.YES
    assert capsys.readouterr().out == f'6 rules written to {out_fp}\n'

    spec = load_spec(out_fp)
    assert 'f_b:' in spec.trs.signature
    with open(out_fp, encoding='utf-8') as fr:
        assert '(COMMENT fresh symbols: f_a=f[a] f_b=f[b] f_b:=f[b :])' in fr.read()

    assert run('transform-shallow', _trs('wallis')) == ExitCode.ERROR
    assert 'Error: ' in capsys.readouterr().err


def test_check_cert(capsys):
    assert run('check-cert', _trs('ordinals'), '--cert', _cert('ordinals')) == ExitCode.YES
    assert capsys.readouterr().out == 'valid\n'

    assert run('check-cert', _trs('ordinals'), '--cert', _cert('ordinals'), '--map', 'top') == ExitCode.NO
    assert 'not monotone' in capsys.readouterr().out


def test_json_report_replays(tmp_path, capsys):
    report_fp = str(tmp_path / 'out' / 'report.json')
    assert run('prove-termination', _trs('ex5_3'), '--map', 'canonical', '--json', report_fp) == ExitCode.NO
    capsys.readouterr()

    with open(report_fp, encoding='utf-8') as fr:
        data = json.load(fr)
    assert data['command'] == 'prove-termination'
    assert data['outcome']['loop']['start'] == 's'

    assert run('check-cert', _trs('ex5_3'), '--cert', report_fp) == ExitCode.YES


def test_json_to_stdout(capsys):
    assert run('canonical', _trs('zip_alt_p'), '--json') == ExitCode.YES
    data = json.loads(capsys.readouterr().out)
    assert data['maps']['canonical'] == '(zip 1)'


@pytest.mark.parametrize(
    'argv, err',
    [
        ([], 'subcommand is required'),
        (['analyze', 'missing.trs'], 'does not exist'),
        (['normalize', _trs('ordinals'), '--term', 'S(0)', '--fuel', '0'], '--fuel must be at least 1'),
        (['normalize', _trs('ordinals'), '--term', 'foo(0)'], 'Unknown symbol "foo"'),
        (['prove-termination', _trs('ordinals'), '--map', 'nope'], 'Unknown replacement map "nope"'),
        (['prove-termination', _trs('ordinals'), '--budget-ms', '-1'], '--budget-ms must not be negative'),
        (['analyze', _trs('ordinals'), '--no-such-option'], 'unrecognized arguments'),
    ],
)
def test_usage_errors(capsys, argv, err):
    assert run(*argv) == ExitCode.ERROR
    assert err in capsys.readouterr().err


def test_unsorted_productivity(tmp_path, capsys):
    fp = tmp_path / 'unsorted.trs'
    fp.write_text('(VAR x) (RULES f(x) -> x)\n')
    assert run('prove-productivity', str(fp)) == ExitCode.ERROR
    assert 'needs a SORTS block' in capsys.readouterr().err


def test_config_file(tmp_path, capsys):
    config = tmp_path / 'custom.toml'
    config.write_text('fuel = 2\nmap = "top"\n')
    assert run('normalize', _trs('wallis'), '--term', 'evenNs', '-c', str(config)) == ExitCode.UNKNOWN
    assert 'FuelExhausted after 2 steps' in capsys.readouterr().out

    # explicit options win over the config file
    assert run('normalize', _trs('wallis'), '--term', 'evenNs', '-c', str(config), '--map', 'strategy') == ExitCode.YES

    (tmp_path / '.csr_prover.toml').write_text('fule = 2\n')
    assert run('normalize', _trs('wallis'), '--term', 'evenNs') == ExitCode.ERROR
    assert 'unknown keys fule' in capsys.readouterr().err
