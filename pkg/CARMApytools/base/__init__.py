from CARMApytools.base import errors
from CARMApytools.base import statespace
from CARMApytools.base import output
