from mvsgrade.achem.molecule import SearchBounds, Molecule, FACTORS, \
    random_molecule, differing_factors
from mvsgrade.achem.reactions import react, wall_collision, mutate_factor
from mvsgrade.achem.fitness import SearchData, DatasetFitness, \
    evaluate_molecule, train_molecule, validation_rate
from mvsgrade.achem.reactor import Reactor, Search, SearchResult, \
    filter_population, consensus_fraction, rank, run_search, \
    write_search_log, save_search_result, search_document, \
    STOP_CONSENSUS, STOP_MAX_CYCLES
