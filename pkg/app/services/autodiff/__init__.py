from app.services.autodiff.tape import DTYPE, Tape, TapeError, backward, check_gradient_fd
from app.services.autodiff.jet import MAX_DEGREE, Jet, jet_tanh
