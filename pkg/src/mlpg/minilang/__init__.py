from .tokens import Token, LexError, tokenize
from .ast import AstNode, pretty_print, structurally_equal
from .parser import ParseError, parse
from .types import TypeLattice, TypeLatticeError, BUILTINS
from .typecheck import (TypecheckError, TypedProgram, VarInfo, FnSig,
                        typecheck, vars_in_scope)
from .cfg import Cfg, Block, build_cfg

SOURCE_EXTENSION = ".ml0"


def analyze(source, file_id="", lattice=None):
    """tokenize + parse + typecheck in one call."""
    return typecheck(parse(tokenize(source, file_id)), lattice)
