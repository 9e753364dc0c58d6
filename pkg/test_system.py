#!/usr/bin/env python3
"""
Script de prueba para validar adlab de extremo a extremo
Ejecuta comprobaciones rápidas de todos los componentes
"""

import io
import math
import sys
import time
from pathlib import Path

# Agregar la raíz del repositorio al path
sys.path.append(str(Path(__file__).parent))


def test_imports():
    """Prueba que todos los módulos se importen correctamente"""
    print("🔍 Probando imports...")

    try:
        from adlab import linalg, divergences
        print("  ✓ linalg y divergences importados")

        from adlab import conic, sdp
        print("  ✓ conic y sdp importados")

        from adlab import protocols, asymptotics, battery
        print("  ✓ protocols, asymptotics y battery importados")

        from adlab import codec, main
        print("  ✓ codec y main importados")

        return True

    except ImportError as e:
        print(f"  ✗ Error de import: {e}")
        return False


def test_solver_backend():
    """Informa del backend cónico disponible"""
    print("\n🧮 Probando backend del solver...")

    try:
        import cvxpy
        print(f"  ✓ cvxpy {cvxpy.__version__} disponible (solvers: {', '.join(cvxpy.installed_solvers())})")
    except ImportError:
        print("  ⚠️ cvxpy no disponible, se usará el IPM interno")

    from adlab.config import Config
    print(f"  ✓ Backend configurado: {Config.SOLVER['backend']}")
    return True


def test_divergences():
    """Valores de referencia sobre cajas de bits"""
    print("\n📐 Probando divergencias...")

    try:
        from adlab.divergences import d_max, d_min, rel_entropy, sandwiched_renyi
        from adlab.protocols import BitsBox

        rho, sigma = BitsBox(3).box()
        for name, value in (('D_min', d_min(rho, sigma)), ('D_max', d_max(rho, sigma)),
                            ('D', rel_entropy(rho, sigma)), ('D̃_2', sandwiched_renyi(rho, sigma, 2.0))):
            if abs(float(value) - 3.0) > 1e-9:
                print(f"  ✗ {name} = {value}, se esperaba 3")
                return False
            print(f"  ✓ {name} = {float(value):.6f}")

        return True

    except Exception as e:
        print(f"  ✗ Error en divergencias: {e}")
        return False


def test_sdp():
    """Programas semidefinidos con valor conocido"""
    print("\n🧩 Probando programas semidefinidos...")

    try:
        from adlab.linalg import basis_state, pi_state
        from adlab.protocols import BitsBox
        from adlab.sdp import box_transform_error, smooth_dmin

        start_time = time.time()
        result = box_transform_error(BitsBox(1).box(), BitsBox(2).box())
        if abs(result.error - 0.5) > 1e-6:
            print(f"  ✗ Error de transformación {result.error}, se esperaba 0.5")
            return False
        print(f"  ✓ 1 bit → 2 bits: ε* = {result.error:.8f} (brecha {result.gap:.1e})")

        value = float(smooth_dmin(basis_state(0, 2), pi_state(4), 0.5).value)
        if abs(value - 3.0) > 1e-5:
            print(f"  ✗ D_min^0.5 = {value}, se esperaba 3")
            return False
        print(f"  ✓ D_min^0.5(|0⟩‖π_4) = {value:.8f}")
        print(f"  ✓ Tiempo: {time.time() - start_time:.3f}s")

        return True

    except Exception as e:
        print(f"  ✗ Error en SDP: {e}")
        return False


def test_protocols():
    """Reproduce destilación y dilución exactas"""
    print("\n🔁 Probando protocolos...")

    try:
        from adlab.linalg import Box, basis_state, pi_state
        from adlab.protocols import BitsBox, exact_dilute_channel, exact_distill_channel, replay
        from adlab.testkit import random_box

        rho, sigma = random_box(3, seed=1, rank=2)
        distill = exact_distill_channel(rho, sigma)
        report = replay(distill.channel, Box(rho, sigma), Box(basis_state(0, 2), pi_state(distill.M)))
        print(f"  ✓ Destilación: log2 M = {math.log2(distill.M):.6f}, error = {report.first_state_error:.1e}")

        rho, sigma = random_box(3, seed=2)
        dilute = exact_dilute_channel(rho, sigma)
        report = replay(dilute.channel, BitsBox(dilute.lam).box(), Box(rho, sigma))
        print(f"  ✓ Dilución: λ = {dilute.lam:.6f}, error = {report.first_state_error:.1e}")

        return report.first_state_error <= 1e-8

    except Exception as e:
        print(f"  ✗ Error en protocolos: {e}")
        return False


def test_cli():
    """Ejecuta la CLI en memoria"""
    print("\n💻 Probando CLI...")

    try:
        from adlab.codec import parse_report
        from adlab.main import run

        out = io.StringIO()
        code = run(['compute', 'dmin', '--rho', 'zero', '--sigma', 'pi2'], stdout=out)
        value = parse_report(out.getvalue())['fields']['value']
        if code != 0 or abs(float(value) - 1.0) > 1e-12:
            print(f"  ✗ compute dmin devolvió código {code}, valor {value}")
            return False
        print("  ✓ compute dmin zero pi2 = 1.0")

        out = io.StringIO()
        code = run(['rate', '--source-rho', 'zero', '--source-sigma', 'one',
                    '--target-rho', 'zero', '--target-sigma', 'pi2'], stdout=out)
        rate = parse_report(out.getvalue())['fields']['rate']
        if code != 0 or rate != 'inf':
            print(f"  ✗ rate devolvió {rate}")
            return False
        print("  ✓ rate con soporte violado = inf")

        return True

    except Exception as e:
        print(f"  ✗ Error en CLI: {e}")
        return False


def test_performance():
    """Mide una batería pequeña"""
    print("\n⚡ Probando rendimiento...")

    try:
        from adlab.battery import run_battery

        start_time = time.time()
        report = run_battery('pseudo-continuity', seed=42, count=20)
        elapsed = time.time() - start_time
        counts = report.counts
        print(f"  ✓ pseudo-continuity: {counts['checks']} comprobaciones en {elapsed:.3f}s")

        start_time = time.time()
        report = run_battery('bridge', seed=42, count=2)
        elapsed = time.time() - start_time
        print(f"  ✓ bridge: {report.counts['checks']} comprobaciones en {elapsed:.3f}s")

        return report.passed()

    except Exception as e:
        print(f"  ✗ Error en prueba de rendimiento: {e}")
        return False


def run_all_tests():
    """Ejecuta todas las pruebas"""
    print("🚀 INICIANDO PRUEBAS DE ADLAB")
    print("=" * 60)

    tests = [
        ("Imports", test_imports),
        ("Backend", test_solver_backend),
        ("Divergencias", test_divergences),
        ("SDP", test_sdp),
        ("Protocolos", test_protocols),
        ("CLI", test_cli),
        ("Rendimiento", test_performance)
    ]

    passed = 0
    total = len(tests)

    for test_name, test_func in tests:
        try:
            if test_func():
                passed += 1
                print(f"✅ {test_name}: PASÓ")
            else:
                print(f"❌ {test_name}: FALLÓ")
        except Exception as e:
            print(f"💥 {test_name}: ERROR - {e}")

    print("\n" + "=" * 60)
    print(f"📊 RESULTADOS: {passed}/{total} pruebas pasaron")

    if passed == total:
        print("🎉 ¡TODAS LAS PRUEBAS PASARON! adlab está listo.")
        return True
    else:
        print("⚠️ Algunas pruebas fallaron. Revisar errores antes de usar.")
        return False


def main():
    """Función principal"""
    try:
        success = run_all_tests()

        if success:
            print("\n🚀 adlab está listo para usar!")
            print("📖 Ejecuta 'python -m adlab --help' para ver los comandos")
            print("🧪 O 'pytest' para la suite completa")
        else:
            print("\n🔧 Corrige los errores antes de continuar")
            sys.exit(1)

    except KeyboardInterrupt:
        print("\n\n⏹️ Pruebas interrumpidas por el usuario")
        sys.exit(1)
    except Exception as e:
        print(f"\n💥 Error fatal durante las pruebas: {e}")
        sys.exit(1)


if __name__ == "__main__":
    main()
