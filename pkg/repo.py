from caputo_scheme import defs
