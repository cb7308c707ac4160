"""Frozen reference values for the special-function tests (mpmath, 30 digits)."""
import mpmath as mp

mp.mp.dps = 30

def theta_of_kappa(kappa):
    return mp.findroot(lambda t: mp.polygamma(1, t) - kappa, 1.0)

if __name__ == "__main__":
    print("digamma(10.3) =", mp.digamma(mp.mpf("10.3")))
    print("trigamma(10.3) =", mp.polygamma(1, mp.mpf("10.3")))
    print("psi2(10.3) =", mp.polygamma(2, mp.mpf("10.3")))
    print("psi2(0.2) =", mp.polygamma(2, mp.mpf("0.2")))
    th = theta_of_kappa(1)
    print("theta(1) =", th)
    f = th * 1 - mp.digamma(th)
    c = mp.cbrt(-mp.polygamma(2, th) / 2)
    print("f(1) =", f, " c(1) =", c)
    for z in ["2.5+1j", "-3.7+0.2j", "0.1-7j", "30+40j", "-20.5+3j", "1e-3+1e-3j"]:
        print("loggamma(%s) =" % z, mp.loggamma(mp.mpc(complex(z))))
