import logging


logger = logging.getLogger("lightdemon")


def logline(level=logging.INFO, c="-", w=120):
    logger.log(level, c * w)


def logframe(name: str, frame, level=logging.INFO):
    """
    Log a pandas frame (or anything printable) under a short name.
    """
    logger.log(level, "%s:\n%s\n", name, frame)
