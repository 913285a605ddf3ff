"""Clean, minimal terminal formatting for command results."""

import os
import re
import sys
from typing import Any, Mapping, Sequence


class OutputFormatter:
    """ANSI helpers; colour is dropped when stdout is not a terminal or NO_COLOR is set."""

    # Color codes
    GREEN = '\033[32m'
    RED = '\033[31m'
    CYAN = '\033[36m'
    BOLD = '\033[1m'
    RESET = '\033[0m'

    @classmethod
    def color_enabled(cls) -> bool:
        return sys.stdout.isatty() and not os.getenv('NO_COLOR')

    @classmethod
    def _paint(cls, text: str, *codes: str) -> str:
        if not cls.color_enabled():
            return text
        return ''.join(codes) + text + cls.RESET

    @classmethod
    def _escape_line(cls, line: str) -> str:
        """Escape special characters for safe terminal display."""
        line = re.sub(r'\x1b\[[0-9;]*m', '', line)
        line = line.replace('\t', '    ')
        return ''.join(char for char in line if ord(char) >= 32)

    @classmethod
    def format_value(cls, value: Any) -> str:
        if isinstance(value, bool):
            return 'true' if value else 'false'
        if isinstance(value, float):
            return f'{value:.6g}'
        if isinstance(value, Mapping):
            return ', '.join(f'{k}={cls.format_value(v)}' for k, v in value.items())
        if isinstance(value, (list, tuple)):
            return '[' + ', '.join(cls.format_value(v) for v in value) + ']'
        return str(value)

    @classmethod
    def format_key_values(cls, pairs: Mapping[str, Any]) -> str:
        lines = []
        for key, value in pairs.items():
            lines.append(f'{cls._paint(key + ":", cls.CYAN)} {cls._escape_line(cls.format_value(value))}')
        return '\n'.join(lines)

    @classmethod
    def format_table(cls, header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
        cells = [[cls.format_value(c) for c in row] for row in rows]
        widths = [len(h) for h in header]
        for row in cells:
            for i, c in enumerate(row):
                widths[i] = max(widths[i], len(c))
        head = '  '.join(h.ljust(w) for h, w in zip(header, widths))
        lines = [cls._paint(head.rstrip(), cls.BOLD)]
        for row in cells:
            lines.append('  '.join(c.ljust(w) for c, w in zip(row, widths)).rstrip())
        return '\n'.join(lines)

    @classmethod
    def format_error(cls, error_msg: str) -> str:
        """Format error message."""
        return f"{cls._paint('❌ Error:', cls.RED)} {error_msg}"

    @classmethod
    def format_success(cls, message: str) -> str:
        """Format success message."""
        return f"{cls._paint('✅', cls.GREEN)} {message}"
