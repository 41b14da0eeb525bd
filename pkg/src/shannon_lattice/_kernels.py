"""Compiled inner loops."""
import numba
import numpy as np


@numba.njit(cache=True)
def is_lex_leader(T, transversal, stabilizer):
    # T is sorted and contains 0, so only images s(t_u(T)) with u in T can be smaller
    m = T.shape[0]
    base = np.empty(m, dtype=transversal.dtype)
    img = np.empty(m, dtype=transversal.dtype)
    for iu in range(m):
        tu = transversal[T[iu]]
        for i in range(m):
            base[i] = tu[T[i]]
        for si in range(-1, stabilizer.shape[0]):
            if si < 0:
                img[:] = base
            else:
                s = stabilizer[si]
                for i in range(m):
                    img[i] = s[base[i]]
            for i in range(1, m):
                x = img[i]
                j = i - 1
                while j >= 0 and img[j] > x:
                    img[j + 1] = img[j]
                    j -= 1
                img[j + 1] = x
            for i in range(m):
                if img[i] != T[i]:
                    if img[i] < T[i]:
                        return False
                    break
    return True
