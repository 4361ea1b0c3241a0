import sys

import main as entry


def no_logging(*args, **kwargs):
    pass


class TestEntryPoint:

    def test_success_passes_through(self, monkeypatch):
        monkeypatch.setattr(entry, 'setup_logging', no_logging)
        monkeypatch.setattr(sys, 'argv', ['main.py', 'randint', '--bound', '4'])
        assert entry.main() == 0

    def test_usage_error_code(self, monkeypatch):
        monkeypatch.setattr(entry, 'setup_logging', no_logging)
        monkeypatch.setattr(sys, 'argv', ['main.py', 'collision', '--mod', '0'])
        assert entry.main() == 1

    def test_unexpected_error_has_own_code(self, monkeypatch):
        def broken(argv):
            raise RuntimeError("сбой")

        monkeypatch.setattr(entry, 'setup_logging', no_logging)
        monkeypatch.setattr(entry, 'cli_main', broken)
        monkeypatch.setattr(sys, 'argv', ['main.py'])
        assert entry.main() == 3

    def test_interrupt(self, monkeypatch):
        def interrupted(argv):
            raise KeyboardInterrupt

        monkeypatch.setattr(entry, 'setup_logging', no_logging)
        monkeypatch.setattr(entry, 'cli_main', interrupted)
        monkeypatch.setattr(sys, 'argv', ['main.py'])
        assert entry.main() == 130
