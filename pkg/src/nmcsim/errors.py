"""Exception types raised across the simulator."""


class NmcError(Exception):
    """Base class for all simulator errors."""


# --- encoding / assembly ---------------------------------------------------

class IllegalOpcode(NmcError):
    """Command word carries an opcode outside the Caesar instruction set."""


class IllegalInstruction(NmcError):
    """Undecodable or unsupported instruction word."""


class ParseError(NmcError):
    def __init__(self, message: str, line: int, col: int = 0):
        super().__init__(f"line {line}: {message}")
        self.line = line
        self.col = col


class UnknownMnemonic(ParseError):
    pass


class OffsetOutOfRange(ParseError):
    pass


class ProgramTooLarge(NmcError):
    """Assembled image exceeds the 512 B instruction memory."""


# --- device runtime --------------------------------------------------------

class AddressOutOfRange(NmcError):
    pass


class InvalidVector(NmcError):
    """Logical vector window falls outside the 32 KiB register file."""


class ElementIndexOutOfRange(NmcError):
    """emvv/emvx element index is not below the current vector length."""


class KernelFault(NmcError):
    """Kernel hit an illegal instruction or a bad access while running."""


class Timeout(NmcError):
    """Kernel did not signal completion within the cycle budget."""


class DeviceRejected(NmcError):
    """Transaction issued while the device is in the wrong mode."""


# --- kernel library --------------------------------------------------------

class ShapeMismatch(NmcError):
    pass


class DoesNotFit(NmcError):
    """Problem footprint exceeds device memory capacity."""
