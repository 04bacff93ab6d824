def carma_test():
    # Testing of the carma module against closed-form CAR(1) results

    import numpy as np
    from CARMApytools.carma import (CarmaSpec, build_system, kernel, kernel_expm,
                                    stationary_covariance)

    test_attr = []
    test_result = []

    car1 = CarmaSpec([6.])
    sys = build_system(car1)

    # KERNEL

    test_attr.append('kernel')
    u = np.array([0., 0.1, 1.])
    test_result.append(bool(np.allclose(kernel(sys, car1, u), np.exp(-6. * u))))

    # KERNEL BY MATRIX EXPONENTIAL

    test_attr.append('kernel_expm')
    spec = CarmaSpec([1.39631, 0.05029], [2., 1.])
    sys2 = build_system(spec)
    u = np.array([0.1, 0.5, 1., 5., 10.])
    test_result.append(bool(np.max(np.abs(kernel(sys2, spec, u) - kernel_expm(sys2, spec, u))) < 1e-10))

    # STATIONARY COVARIANCE

    test_attr.append('stationary_covariance')
    Sigma, acvf = stationary_covariance(sys, car1, (0., 1.))
    test_result.append(bool(np.isclose(Sigma[0, 0], 1. / 12.) and np.isclose(acvf(1.), np.exp(-6.) / 12.)))

    return [test_attr, test_result]


def ats_test():
    # Testing of the ats module: closed form against ODE integration

    import numpy as np
    from CARMApytools.ats import affine_coeffs_closed, affine_coeffs_ode, ode_residual
    from CARMApytools.carma import CarmaSpec, build_system

    test_attr = []
    test_result = []

    sys = build_system(CarmaSpec([0.5]))

    test_attr.append('affine_coeffs')
    closed = affine_coeffs_closed(sys, 5.)
    ode = affine_coeffs_ode(sys, 5.)
    test_result.append(bool(abs(closed.A_val - ode.A_val) < 1e-8 and abs(closed.B_val - ode.B_val) < 1e-8))

    test_attr.append('ode_residual')
    test_result.append(bool(abs(ode_residual(0.5, 5.)) < 1e-12))

    return [test_attr, test_result]


def credit_test():
    # Testing of the credit module: credit triangle and fair spread

    from CARMApytools.credit import (DiscountCurve, IntensityPath, RecoveryParams,
                                     credit_triangle_spread, fair_spread, invert_spread)

    test_attr = []
    test_result = []

    srr = RecoveryParams.stochastic(0.0378, -0.0095, 0.637)
    crr = RecoveryParams.constant(0.4)

    test_attr.append('invert_spread')
    s = credit_triangle_spread(srr, 0.02)
    test_result.append(bool(abs(invert_spread(srr, s) - 0.02) < 1e-12))

    test_attr.append('fair_spread')
    path = IntensityPath.constant(0.05, 5., 0.01)
    test_result.append(bool(abs(fair_spread([path], crr, DiscountCurve(0.03), 0., 5.) - 0.03) < 1e-10))

    return [test_attr, test_result]


def inference_test():
    # Testing of the inference module: Kalman likelihood of an AR(1) sample

    import numpy as np
    from scipy.stats import norm
    from CARMApytools.carma import CarmaSpec, simulate
    from CARMApytools.inference import kalman_loglik, bic
    from CARMApytools.levy import Brownian

    test_attr = []
    test_result = []

    spec = CarmaSpec([1.])
    y = simulate(spec, Brownian(0., np.sqrt(2.)), 0.5, 200, rng=0).outputs
    phi = np.exp(-0.5)
    ll = norm.logpdf(y[0], 0., 1.) + np.sum(norm.logpdf(y[1:], phi * y[:-1], np.sqrt(1 - phi**2)))

    test_attr.append('kalman_loglik')
    test_result.append(bool(abs(kalman_loglik(spec, (0., 2.), y, 0.5) - ll) < 1e-6))

    test_attr.append('bic')
    test_result.append(bool(np.isclose(bic(-100., 3, 1000), 200. + 3 * np.log(1000))))

    return [test_attr, test_result]


def test_all():
    # Testing of all the above modules

    print('***Testing of the carma module:***\n')
    for attr, res in zip(*carma_test()):
        print(attr, res)

    print('\n***Testing of the ats module:***\n')
    for attr, res in zip(*ats_test()):
        print(attr, res)

    print('\n***Testing of the credit module:***\n')
    for attr, res in zip(*credit_test()):
        print(attr, res)

    print('\n***Testing of the inference module:***\n')
    for attr, res in zip(*inference_test()):
        print(attr, res)
