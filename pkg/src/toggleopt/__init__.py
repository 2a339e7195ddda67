"""Toggle-activity-guided logic rewriting for LUT netlists."""

from .activity import ActivityProfile, Stimulus, generate_stimulus, read_profile, \
    run_simulation, simulate, write_profile
from .equiv import EquivResult, exhaustive_equiv, lockstep_equiv
from .netlist import Cell, Latch, Netlist, NetlistBuilder, area_luts, emit_blif, fanout, \
    parse_blif
from .optpass import OptConfig, PassReport, duplicate_driver, median_threshold, run_pass, \
    select_targets, shannon_rewrite
from .power import PowerConfig, PowerReport, compare_reports, estimate_dynamic_power, \
    net_capacitance
from .truthtable import Cut, TruthTable, concat_cofactors, find_split_var, \
    shannon_cofactor, truth_table_decompose, tt_eval

__version__ = "0.1.0"
