"""Identifier subtokenization on camelCase, snake_case and digit boundaries."""

import re

_SPLITTER = re.compile(r"""
    [A-Z]+(?=[A-Z][a-z0-9])   # acronym followed by a capitalized word
  | [A-Z]+(?![a-z])           # trailing acronym / all-caps run
  | [A-Z][a-z]*               # capitalized word
  | [a-z]+                    # lowercase run
  | [0-9]+                    # digit run
""", re.VERBOSE)


def split_subtokens(name):
    """Split an identifier into lowercase subtokens.

    'classTypes' -> ['class', 'types']; 'input_stream2Buf' ->
    ['input', 'stream', '2', 'buf'].
    """
    parts = _SPLITTER.findall(name)
    return [p.lower() for p in parts] if parts else [name.lower()]
