"""Physical constants (SI) shared by the model and simulator."""

Q_ELEMENTARY = 1.602176634e-19  # C
K_BOLTZMANN = 1.380649e-23      # J/K
EPS0 = 8.8541878128e-12         # F/m
EPS_SI = 11.7 * EPS0            # silicon permittivity, F/m
EPS_SIO2 = 3.9 * EPS0           # gate-oxide (SiO2) permittivity, F/m


def thermal_voltage(temperature_k: float) -> float:
    """kT/q in volts."""
    return K_BOLTZMANN * temperature_k / Q_ELEMENTARY
